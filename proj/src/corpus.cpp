#include "tts/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <omp.h>

namespace tts {

int thread_count() { return omp_get_max_threads(); }

void set_thread_count(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

CorpusFormat parse_corpus_format(const std::string& name) {
  if (name == "triplet") return CorpusFormat::triplet;
  if (name == "dense_csv") return CorpusFormat::dense_csv;
  throw ConfigError("unknown corpus format '" + name + "' (expected triplet or dense_csv)");
}

FrequencyMatrix FrequencyMatrix::from_dense(const Matrix& d0, double avg_len) {
  if (!(avg_len > 0.0)) throw ConfigError("average document length must be positive");
  FrequencyMatrix f;
  f.d = d0.sparseView(0.0, 0.0);
  f.d.makeCompressed();
  f.avg_len = avg_len;
  return f;
}

CorpusMatrix::CorpusMatrix(SparseCounts counts, std::vector<std::int64_t> doc_lengths,
                           std::vector<std::string> vocab)
    : counts_(std::move(counts)), doc_lengths_(std::move(doc_lengths)), vocab_(std::move(vocab)) {
  counts_.makeCompressed();
  if (vocab_.empty()) {
    vocab_.reserve(static_cast<std::size_t>(counts_.rows()));
    for (Index j = 0; j < counts_.rows(); ++j) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "w%04lld", static_cast<long long>(j + 1));
      vocab_.emplace_back(buf);
    }
  }
}

CorpusMatrix CorpusMatrix::from_counts(SparseCounts counts, std::vector<std::string> vocab) {
  counts.makeCompressed();
  std::vector<std::int64_t> lengths(static_cast<std::size_t>(counts.cols()), 0);
  for (Index i = 0; i < counts.cols(); ++i)
    for (SparseCounts::InnerIterator it(counts, i); it; ++it) lengths[i] += it.value();
  CorpusMatrix c(std::move(counts), std::move(lengths), std::move(vocab));
  auto report = validate_corpus(c);
  if (!report.ok()) throw ConfigError("invalid corpus: " + report.failures.front());
  return c;
}

CorpusMatrix CorpusMatrix::from_dense(
    const Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>& counts) {
  SparseCounts s = counts.sparseView();
  return from_counts(std::move(s));
}

double CorpusMatrix::avg_len() const {
  if (doc_lengths_.empty()) return 0.0;
  long double total = 0;
  for (auto len : doc_lengths_) total += len;
  return static_cast<double>(total / static_cast<long double>(doc_lengths_.size()));
}

FrequencyMatrix CorpusMatrix::frequencies() const {
  FrequencyMatrix f;
  f.d = counts_.cast<double>();
  for (Index i = 0; i < f.d.cols(); ++i) {
    const double len = static_cast<double>(doc_lengths_[i]);
    for (SparseReal::InnerIterator it(f.d, i); it; ++it) it.valueRef() /= len;
  }
  f.d.makeCompressed();
  f.avg_len = avg_len();
  return f;
}

CorpusMatrix CorpusMatrix::select_documents(const std::vector<Index>& docs) const {
  std::vector<Eigen::Triplet<std::int64_t, Index>> trip;
  std::vector<std::int64_t> lengths;
  lengths.reserve(docs.size());
  for (std::size_t c = 0; c < docs.size(); ++c) {
    const Index i = docs[c];
    if (i < 0 || i >= n()) throw ConfigError("document index out of range");
    for (SparseCounts::InnerIterator it(counts_, i); it; ++it)
      trip.emplace_back(it.row(), static_cast<Index>(c), it.value());
    lengths.push_back(doc_lengths_[i]);
  }
  SparseCounts sub(p(), static_cast<Index>(docs.size()));
  sub.setFromTriplets(trip.begin(), trip.end());
  return CorpusMatrix(std::move(sub), std::move(lengths), vocab_);
}

FrequencyDiagonal word_frequency_diag(const FrequencyMatrix& freq) {
  FrequencyDiagonal out;
  out.n_docs = freq.n();
  out.avg_len = freq.avg_len;
  out.m.assign(static_cast<std::size_t>(freq.p()), 0.0);
  // Column-by-column accumulation keeps the summation order fixed.
  for (Index i = 0; i < freq.n(); ++i)
    for (SparseReal::InnerIterator it(freq.d, i); it; ++it) out.m[it.row()] += it.value();
  const double inv_n = 1.0 / static_cast<double>(freq.n());
  for (auto& v : out.m) v *= inv_n;
  return out;
}

FrequencyDiagonal word_frequency_diag(const CorpusMatrix& corpus) {
  return word_frequency_diag(corpus.frequencies());
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  os << "p=" << p << " n=" << n << " N_min=" << min_len << " N_mean=" << mean_len
     << " N_max=" << max_len << " unobserved_words=" << zero_rows;
  if (zero_rows > 0) os << " (" << zero_rows << " unobserved words)";
  os << (ok() ? " status=pass" : " status=fail");
  for (const auto& f : failures) os << "\n  " << f;
  return os.str();
}

ValidationReport validate_corpus(const CorpusMatrix& corpus) {
  ValidationReport r;
  r.p = corpus.p();
  r.n = corpus.n();
  const auto& counts = corpus.counts();
  const auto& lengths = corpus.doc_lengths();
  if (r.p < 1) r.failures.emplace_back("vocabulary is empty (p = 0)");
  if (r.n < 1) r.failures.emplace_back("corpus has no documents (n = 0)");
  if (static_cast<Index>(lengths.size()) != r.n) {
    r.failures.emplace_back("doc_lengths has " + std::to_string(lengths.size()) +
                            " entries for " + std::to_string(r.n) + " documents");
    return r;
  }
  if (static_cast<Index>(corpus.vocab().size()) != r.p)
    r.failures.emplace_back("vocabulary has " + std::to_string(corpus.vocab().size()) +
                            " tokens for " + std::to_string(r.p) + " words");

  std::vector<char> seen(static_cast<std::size_t>(r.p), 0);
  long double total = 0;
  r.min_len = r.n > 0 ? lengths[0] : 0;
  r.max_len = r.min_len;
  for (Index i = 0; i < r.n; ++i) {
    std::int64_t col = 0;
    bool negative = false;
    for (SparseCounts::InnerIterator it(counts, i); it; ++it) {
      if (it.value() < 0) negative = true;
      if (it.value() != 0) seen[it.row()] = 1;
      col += it.value();
    }
    if (negative) r.failures.push_back("document " + std::to_string(i + 1) + " has a negative count");
    if (lengths[i] < 1)
      r.failures.push_back("document " + std::to_string(i + 1) + " is empty (N_i = " +
                           std::to_string(lengths[i]) + ")");
    if (col != lengths[i])
      r.failures.push_back("document " + std::to_string(i + 1) + " column sum " + std::to_string(col) +
                           " differs from declared length " + std::to_string(lengths[i]));
    r.min_len = std::min(r.min_len, lengths[i]);
    r.max_len = std::max(r.max_len, lengths[i]);
    total += lengths[i];
  }
  r.mean_len = r.n > 0 ? static_cast<double>(total / r.n) : 0.0;
  r.zero_rows = static_cast<Index>(std::count(seen.begin(), seen.end(), 0));
  return r;
}

namespace {

bool skippable(const std::string& line) {
  auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

template <typename T>
T parse_number(std::string_view tok, std::size_t line_no, const char* what) {
  T value{};
  auto first = tok.data();
  auto last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw FormatError(std::string("malformed ") + what + " '" + std::string(tok) + "'", line_no);
  return value;
}

std::vector<std::string_view> split_tokens(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i <= line.size()) {
    if (sep == ' ') {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
      if (i >= line.size()) break;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
      out.push_back(line.substr(i, j - i));
      i = j;
    } else {
      std::size_t j = line.find(sep, i);
      if (j == std::string_view::npos) j = line.size();
      auto tok = line.substr(i, j - i);
      while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.remove_prefix(1);
      while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t' || tok.back() == '\r'))
        tok.remove_suffix(1);
      out.push_back(tok);
      i = j + 1;
    }
  }
  return out;
}

CorpusMatrix finish_load(SparseCounts counts, std::size_t header_line) {
  counts.makeCompressed();
  std::vector<std::int64_t> lengths(static_cast<std::size_t>(counts.cols()), 0);
  for (Index i = 0; i < counts.cols(); ++i)
    for (SparseCounts::InnerIterator it(counts, i); it; ++it) lengths[i] += it.value();
  for (Index i = 0; i < counts.cols(); ++i)
    if (lengths[i] == 0)
      throw FormatError("document " + std::to_string(i + 1) + " is empty (N_i = 0)", header_line);
  return CorpusMatrix(std::move(counts), std::move(lengths));
}

CorpusMatrix load_triplet(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t header_line = 0;
  Index p = -1, n = -1;
  long long nnz = -1;
  std::vector<Eigen::Triplet<std::int64_t, Index>> trip;
  long long seen = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    auto toks = split_tokens(line, ' ');
    if (toks.size() != 3) throw FormatError("expected 3 fields, found " + std::to_string(toks.size()), line_no);
    if (p < 0) {
      p = parse_number<Index>(toks[0], line_no, "p");
      n = parse_number<Index>(toks[1], line_no, "n");
      nnz = parse_number<long long>(toks[2], line_no, "nnz");
      if (p < 1 || n < 1 || nnz < 0) throw FormatError("header requires p >= 1, n >= 1, nnz >= 0", line_no);
      header_line = line_no;
      trip.reserve(static_cast<std::size_t>(nnz));
      continue;
    }
    auto j = parse_number<long long>(toks[0], line_no, "word index");
    auto i = parse_number<long long>(toks[1], line_no, "document index");
    auto c = parse_number<long long>(toks[2], line_no, "count");
    if (j < 1 || j > p) throw FormatError("word index " + std::to_string(j) + " outside [1, " + std::to_string(p) + "]", line_no);
    if (i < 1 || i > n) throw FormatError("document index " + std::to_string(i) + " outside [1, " + std::to_string(n) + "]", line_no);
    if (c < 0) throw FormatError("negative count " + std::to_string(c), line_no);
    ++seen;
    if (seen > nnz) throw FormatError("more entries than the declared nnz = " + std::to_string(nnz), line_no);
    if (c > 0) trip.emplace_back(static_cast<Index>(j - 1), static_cast<Index>(i - 1), c);
  }
  if (p < 0) throw FormatError("missing header line 'p n nnz'", line_no == 0 ? 1 : line_no);
  if (seen != nnz)
    throw FormatError("declared nnz = " + std::to_string(nnz) + " but found " + std::to_string(seen) + " entries",
                      line_no);
  SparseCounts counts(p, n);
  counts.setFromTriplets(trip.begin(), trip.end());
  return finish_load(std::move(counts), header_line);
}

CorpusMatrix load_dense(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<Eigen::Triplet<std::int64_t, Index>> trip;
  Index n = -1;
  Index row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    auto toks = split_tokens(line, ',');
    if (n < 0) n = static_cast<Index>(toks.size());
    if (static_cast<Index>(toks.size()) != n)
      throw FormatError("expected " + std::to_string(n) + " columns, found " + std::to_string(toks.size()), line_no);
    for (Index i = 0; i < n; ++i) {
      auto c = parse_number<long long>(toks[i], line_no, "count");
      if (c < 0) throw FormatError("negative count " + std::to_string(c), line_no);
      if (c > 0) trip.emplace_back(row, i, c);
    }
    ++row;
  }
  if (row == 0) throw FormatError("empty dense CSV", 1);
  SparseCounts counts(row, n);
  counts.setFromTriplets(trip.begin(), trip.end());
  return finish_load(std::move(counts), 1);
}

}  // namespace

CorpusMatrix load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open corpus file " + path.string());
  return format == CorpusFormat::triplet ? load_triplet(in) : load_dense(in);
}

void save_corpus(const std::filesystem::path& path, const CorpusMatrix& corpus, CorpusFormat format) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write corpus file " + path.string());
  const auto& counts = corpus.counts();
  if (format == CorpusFormat::triplet) {
    Index nnz = 0;
    for (Index i = 0; i < counts.cols(); ++i)
      for (SparseCounts::InnerIterator it(counts, i); it; ++it)
        if (it.value() != 0) ++nnz;
    out << counts.rows() << ' ' << counts.cols() << ' ' << nnz << '\n';
    for (Index i = 0; i < counts.cols(); ++i)
      for (SparseCounts::InnerIterator it(counts, i); it; ++it)
        if (it.value() != 0) out << it.row() + 1 << ' ' << i + 1 << ' ' << it.value() << '\n';
  } else {
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> dense = counts;
    for (Index j = 0; j < dense.rows(); ++j) {
      for (Index i = 0; i < dense.cols(); ++i) out << (i ? "," : "") << dense(j, i);
      out << '\n';
    }
  }
}

std::vector<std::string> load_vocab(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open vocabulary file " + path.string());
  std::vector<std::string> vocab;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    vocab.push_back(line);
  }
  return vocab;
}

Matrix read_dense_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    auto toks = split_tokens(line, ',');
    std::vector<double> row;
    row.reserve(toks.size());
    for (auto tok : toks) {
      // from_chars for double is available in libstdc++ 11
      row.push_back(parse_number<double>(tok, line_no, "value"));
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw FormatError("ragged row (" + std::to_string(row.size()) + " fields)", line_no);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError("empty CSV", 1);
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
  return m;
}

void write_dense_csv(const std::filesystem::path& path, const Matrix& m) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw ConfigError("cannot write " + path.string());
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) std::fprintf(f, c ? ",%.17g" : "%.17g", m(r, c));
    std::fputc('\n', f);
  }
  std::fclose(f);
}

}  // namespace tts
