// Command-line driver: synth, fit, estimate-k, eval, resolution, sweep, reproduce.

#include "tts/corpus.hpp"
#include "tts/estimator.hpp"
#include "tts/eval.hpp"
#include "tts/spectral.hpp"
#include "tts/sweep.hpp"
#include "tts/synth.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out = "tts_out";
};

struct CorpusArgs {
  std::string input;
  std::string format = "triplet";
  std::string vocab;

  tts::CorpusMatrix load() const {
    if (input.empty()) throw tts::ConfigError("--input is required");
    tts::CorpusMatrix c = tts::load_corpus(input, tts::parse_corpus_format(format));
    if (!vocab.empty()) {
      auto words = tts::load_vocab(vocab);
      if (static_cast<tts::Index>(words.size()) != c.p())
        throw tts::ConfigError("vocabulary has " + std::to_string(words.size()) + " entries, corpus has p=" +
                               std::to_string(c.p()));
      c = tts::CorpusMatrix(c.counts(), c.doc_lengths(), std::move(words));
    }
    return c;
  }

  void add(CLI::App* cmd) {
    cmd->add_option("--input", input, "Corpus file")->required();
    cmd->add_option("--format", format, "triplet or dense_csv")->capture_default_str();
    cmd->add_option("--vocab", vocab, "Vocabulary file, one token per line");
  }
};

struct FitArgs {
  std::string k = "auto";
  double alpha = 0.005;
  std::string vh = "sp";
  tts::Index svs_l = 0;
  double aa_lambda = 0.0;
  int aa_restarts = 5;
  double g_n = 0.0;

  void add(CLI::App* cmd) {
    cmd->add_option("--k", k, "Number of topics, or auto")->capture_default_str();
    cmd->add_option("--alpha", alpha, "Frequency threshold constant")->capture_default_str();
    cmd->add_option("--vh", vh, "Vertex hunter: sp, svs or aa")->capture_default_str();
    cmd->add_option("--svs-l", svs_l, "SVS cluster count L (default 10 K)");
    cmd->add_option("--aa-lambda", aa_lambda, "AA Lagrange weight (default: grid 0.1, 1, 10)");
    cmd->add_option("--aa-restarts", aa_restarts, "AA restarts")->capture_default_str();
    cmd->add_option("--g-n", g_n, "Eigenvalue cutoff constant for K estimation (default 8 log p_n)");
  }

  tts::FitConfig config(std::uint64_t seed) const {
    tts::FitConfig c;
    if (k != "auto") {
      try {
        std::size_t used = 0;
        const long long v = std::stoll(k, &used);
        if (used != k.size()) throw std::invalid_argument(k);
        c.k = static_cast<tts::Index>(v);
      } catch (const std::logic_error&) {
        throw tts::ConfigError("--k expects an integer or 'auto', got '" + k + "'");
      }
    }
    c.alpha = alpha;
    c.vh = tts::parse_vertex_method(vh);
    c.svs.centers = svs_l;
    if (aa_lambda > 0.0) c.aa.lambda = aa_lambda;
    c.aa.restarts = aa_restarts;
    if (g_n > 0.0) {
      c.g_n_mode = tts::GnMode::fixed;
      c.g_n_value = g_n;
    }
    c.seed = seed;
    c.validate();
    return c;
  }
};

std::ofstream open_file(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw tts::ConfigError("cannot write " + p.string());
  return out;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_scree(const fs::path& path, const tts::Vector& vals) {
  auto out = open_file(path);
  out << "rank,eigenvalue\n";
  for (tts::Index r = 0; r < vals.size(); ++r) out << r + 1 << ',' << num(vals[r]) << '\n';
}

void run_synth(const Globals& g, tts::GenerationConfig cfg, const std::string& config_path) {
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw tts::ConfigError("cannot read " + config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    cfg = tts::GenerationConfig::from_json(ss.str());
  }
  cfg.seed = g.seed;
  cfg.validate();
  const fs::path out(g.out);
  fs::create_directories(out);
  tts::SyntheticCorpus s = tts::generate_corpus(cfg);
  tts::save_corpus(out / "corpus.txt", s.corpus, tts::CorpusFormat::triplet);
  tts::write_dense_csv(out / "A.csv", s.a);
  tts::write_dense_csv(out / "W.csv", s.w);
  open_file(out / "config.json") << cfg.to_json() << '\n';
  tts::write_manifest(out, "synth", cfg.to_json());
  std::cout << "wrote corpus.txt, A.csv, W.csv to " << out.string() << '\n';
}

void run_fit(const Globals& g, const CorpusArgs& ca, const FitArgs& fa, const std::string& dump_cloud, bool w_hat,
             const std::string& w_mode) {
  const tts::FitConfig cfg = fa.config(g.seed);
  const fs::path out(g.out);
  fs::create_directories(out);
  tts::write_manifest(out, "fit", tts::fit_config_json(cfg));
  const tts::CorpusMatrix corpus = ca.load();
  tts::FitResult r;
  try {
    r = tts::fit_tts(corpus, cfg);
  } catch (const tts::ConfigError&) {
    if (!cfg.k) {
      // Leave the scree data behind for manual inspection.
      const auto j = tts::threshold_vocabulary(corpus, cfg.alpha, 1);
      write_scree(out / "scree.csv", tts::top_eigenvalues(tts::build_gram(corpus, j), 30, cfg.eigen));
    }
    throw;
  }
  tts::write_dense_csv(out / "a_hat.csv", r.a_hat);
  json d;
  d["k_used"] = r.k_used;
  d["j_size"] = r.diagnostics.j_size;
  d["removed_fraction"] = r.diagnostics.removed_fraction;
  d["threshold_value"] = r.j_set.threshold_value;
  d["spectrum"] = std::vector<double>(r.spectrum.data(), r.spectrum.data() + r.spectrum.size());
  d["dropped_rows"] = r.diagnostics.dropped_rows;
  d["clipped_rows"] = r.diagnostics.clipped_rows;
  d["fallback_rows"] = r.diagnostics.fallback_rows;
  d["vertex_hunter"] = tts::to_string(r.vertices.method);
  d["vertices_degenerate"] = r.vertices.degenerate;
  if (r.diagnostics.k_eigen) d["k_eigen"] = *r.diagnostics.k_eigen;
  d["g_n"] = r.diagnostics.g_n;
  d["timings"] = r.diagnostics.stage_seconds;
  d["wall_seconds"] = r.diagnostics.wall_seconds;
  d["warnings"] = r.diagnostics.warnings;
  open_file(out / "diagnostics.json") << d.dump(2) << '\n';
  for (const auto& w : r.diagnostics.warnings) std::cerr << "warning: " << w << '\n';

  if (!dump_cloud.empty()) {
    auto c = open_file(dump_cloud);
    c << "word_id";
    for (tts::Index t = 0; t < r.cloud.dim(); ++t) c << ",r" << t + 1;
    c << ",xi1\n";
    for (tts::Index a = 0; a < r.cloud.size(); ++a) {
      c << r.cloud.word_ids[a] + 1;
      for (tts::Index t = 0; t < r.cloud.dim(); ++t) c << ',' << num(r.cloud.points(a, t));
      c << ',' << num(r.cloud.xi1[a]) << '\n';
    }
  }
  if (w_hat) {
    const auto mode = w_mode == "box" ? tts::WeightMode::box : tts::WeightMode::simplex;
    if (w_mode != "box" && w_mode != "simplex") throw tts::ConfigError("--w-mode expects simplex or box");
    tts::WeightEstimate we = tts::estimate_document_weights(corpus, r.a_hat, mode);
    if (we.degenerate_docs > 0)
      std::cerr << "warning: degenerate design for " << we.degenerate_docs << " documents; uniform weights used\n";
    tts::write_dense_csv(out / "w_hat.csv", we.w_hat);
  }
  std::cout << "K=" << r.k_used << " |J|=" << r.diagnostics.j_size << " removed_fraction=" << r.diagnostics.removed_fraction
            << " -> " << (out / "a_hat.csv").string() << '\n';
}

void run_estimate_k(const Globals& g, const CorpusArgs& ca, double alpha, double g_n_arg) {
  const fs::path out(g.out);
  json cfg;
  cfg["alpha"] = alpha;
  cfg["g_n"] = g_n_arg > 0.0 ? json(g_n_arg) : json("8 log p_n");
  tts::write_manifest(out, "estimate-k", cfg.dump());
  const tts::CorpusMatrix corpus = ca.load();
  const auto j = tts::threshold_vocabulary(corpus, alpha, 1);
  const tts::GramBlock block = tts::build_gram(corpus, j);
  const double g_n = g_n_arg > 0.0 ? g_n_arg : tts::default_g_n(block);
  const tts::Index k_eig = tts::estimate_k_eigen(block, g_n);
  const tts::Index k_sing = tts::estimate_k_singular(corpus, j);
  const tts::Vector vals = tts::top_eigenvalues(block, 30);
  std::string knee = "";
  if (vals.size() >= 3) {
    const auto kr = tts::kneedle_knee(std::vector<double>(vals.data(), vals.data() + vals.size()), true);
    knee = std::to_string(kr.index) + (kr.low_confidence ? " (low confidence)" : "");
  }
  std::cout << "k_eigen," << k_eig << "\nk_singular," << k_sing << "\nknee," << knee << "\ncutoff,"
            << num(tts::eigen_cutoff(block, g_n)) << "\n\nrank,eigenvalue\n";
  for (tts::Index r = 0; r < vals.size(); ++r) std::cout << r + 1 << ',' << num(vals[r]) << '\n';
  write_scree(out / "scree.csv", vals);
}

void run_eval(const Globals& g, const std::string& a_hat, const std::string& truth, const std::string& w_hat,
              const std::string& labels) {
  const fs::path out(g.out);
  json cfg;
  cfg["a_hat"] = a_hat;
  cfg["truth"] = truth;
  cfg["w_hat"] = w_hat;
  cfg["labels"] = labels;
  tts::write_manifest(out, "eval", cfg.dump());
  std::ostringstream rows;
  rows << "metric,value,seed\n";
  if (!a_hat.empty() && !truth.empty()) {
    const tts::Matrix a = tts::read_dense_csv(a_hat), t = tts::read_dense_csv(truth);
    rows << "l1_loss," << num(tts::l1_permuted_loss(a, t)) << ',' << g.seed << '\n';
    rows << "topic_resolution," << num(tts::topic_resolution(a, t)) << ',' << g.seed << '\n';
  }
  if (!w_hat.empty() && !labels.empty()) {
    const auto al = tts::label_alignment(tts::read_dense_csv(w_hat), tts::read_dense_csv(labels));
    rows << "label_distance," << num(al.aggregate) << ',' << g.seed << '\n';
    for (std::size_t k = 0; k < al.per_topic_scores.size(); ++k)
      rows << "label_cosine_" << k + 1 << ',' << num(al.per_topic_scores[k]) << ',' << g.seed << '\n';
  }
  if (rows.str() == "metric,value,seed\n") throw tts::ConfigError("eval needs --a-hat with --truth, or --w-hat with --labels");
  std::cout << rows.str();
  open_file(out / "eval.csv") << rows.str();
}

void run_resolution(const Globals& g, const CorpusArgs& ca, const FitArgs& fa, int splits, bool duplicate) {
  const tts::FitConfig cfg = fa.config(g.seed);
  const fs::path out(g.out);
  json c = json::parse(tts::fit_config_json(cfg));
  c["splits"] = splits;
  c["duplicate_halves"] = duplicate;
  tts::write_manifest(out, "resolution", c.dump());
  tts::SplitHalfOptions opts;
  opts.n_splits = splits;
  opts.seed = g.seed;
  opts.duplicate_halves = duplicate;
  const auto r = tts::split_half_resolution(ca.load(), cfg, opts);
  auto f = open_file(out / "resolution.csv");
  f << "split,eta,error\n";
  for (std::size_t s = 0; s < r.eta.size(); ++s) {
    f << s << ',' << (r.eta[s] ? num(*r.eta[s]) : "") << ',';
    std::string e = r.failures[s];
    for (char& ch : e)
      if (ch == ',' || ch == '\n') ch = ' ';
    f << e << '\n';
  }
  std::cout << "metric,value,seed\neta_median," << num(r.median) << ',' << g.seed << "\neta_iqr," << num(r.iqr) << ','
            << g.seed << "\ncompleted_splits," << r.completed << ',' << g.seed << '\n';
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      grid.push_back(std::stod(item));
    } catch (const std::logic_error&) {
      throw tts::ConfigError("bad grid value '" + item + "'");
    }
  }
  return grid;
}

std::vector<std::string> parse_grid_strings(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thresholded Topic-SCORE: sparse topic modeling under pLSI"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--threads", g.threads, "OpenMP threads (0 = runtime default)");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.set_version_flag("--version", TTS_VERSION);

  tts::GenerationConfig gen;
  std::string gen_mode = "zipf", gen_config;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic pLSI corpus");
  synth->add_option("--config", gen_config, "Generation config JSON (overrides flags)");
  synth->add_option("--p", gen.p)->capture_default_str();
  synth->add_option("--n", gen.n)->capture_default_str();
  synth->add_option("--K", gen.K)->capture_default_str();
  synth->add_option("--N", gen.N)->capture_default_str();
  synth->add_option("--anchors", gen.anchors_per_topic, "Anchor words per topic")->capture_default_str();
  synth->add_option("--delta-anchor", gen.delta_anchor)->capture_default_str();
  synth->add_option("--mode", gen_mode, "zipf or uniform")->capture_default_str();
  synth->add_option("--a-zipf", gen.a_zipf)->capture_default_str();
  synth->add_option("--b-zipf", gen.b_zipf)->capture_default_str();
  synth->add_option("--dirichlet", gen.dirichlet_alpha, "Dirichlet parameter, K values")->delimiter(',');

  CorpusArgs fit_corpus;
  FitArgs fit_args;
  std::string dump_cloud, w_mode = "simplex";
  bool want_w = false;
  auto* fit = app.add_subcommand("fit", "Estimate the topic-word matrix");
  fit_corpus.add(fit);
  fit_args.add(fit);
  fit->add_option("--dump-cloud", dump_cloud, "Write the SCORE point cloud as CSV");
  fit->add_flag("--w-hat", want_w, "Also estimate document weights (w_hat.csv)");
  fit->add_option("--w-mode", w_mode, "simplex or box")->capture_default_str();

  CorpusArgs ek_corpus;
  double ek_alpha = 0.005, ek_gn = 0.0;
  auto* ek = app.add_subcommand("estimate-k", "Estimate the number of topics");
  ek_corpus.add(ek);
  ek->add_option("--alpha", ek_alpha)->capture_default_str();
  ek->add_option("--g-n", ek_gn, "Eigenvalue cutoff constant (default 8 log p_n)");

  std::string ev_a, ev_truth, ev_w, ev_labels;
  auto* ev = app.add_subcommand("eval", "Compare estimates with ground truth");
  ev->add_option("--a-hat", ev_a);
  ev->add_option("--truth", ev_truth);
  ev->add_option("--w-hat", ev_w);
  ev->add_option("--labels", ev_labels, "K x n zero-one label matrix CSV");

  CorpusArgs res_corpus;
  FitArgs res_args;
  int splits = 25;
  bool duplicate = false;
  auto* res = app.add_subcommand("resolution", "Split-half topic resolution");
  res_corpus.add(res);
  res_args.add(res);
  res->add_option("--splits", splits)->capture_default_str();
  res->add_flag("--duplicate-halves", duplicate, "Fit the same half twice (sanity check)");

  tts::SweepSpec sweep_spec;
  std::string vary = "n", grid_text, methods_text = "tts/sp", sweep_mode = "zipf";
  auto* sw = app.add_subcommand("sweep", "Parameter sweep over synthetic corpora");
  sw->add_option("--vary", vary, "n, p, N, K, alpha, a_zipf or delta_anchor")->capture_default_str();
  sw->add_option("--grid", grid_text, "Comma-separated values")->required();
  sw->add_option("--trials", sweep_spec.trials)->capture_default_str();
  sw->add_option("--methods", methods_text, "Comma-separated estimator/hunter pairs")->capture_default_str();
  sw->add_flag("--estimate-k", sweep_spec.estimate_k, "Fit with estimated K");
  sw->add_option("--p", sweep_spec.gen.p)->capture_default_str();
  sw->add_option("--n", sweep_spec.gen.n)->capture_default_str();
  sw->add_option("--K", sweep_spec.gen.K)->capture_default_str();
  sw->add_option("--N", sweep_spec.gen.N)->capture_default_str();
  sw->add_option("--anchors", sweep_spec.gen.anchors_per_topic)->capture_default_str();
  sw->add_option("--delta-anchor", sweep_spec.gen.delta_anchor)->capture_default_str();
  sw->add_option("--mode", sweep_mode)->capture_default_str();
  sw->add_option("--a-zipf", sweep_spec.gen.a_zipf)->capture_default_str();
  sw->add_option("--alpha", sweep_spec.fit.alpha)->capture_default_str();

  std::string figure;
  tts::FigureOptions fig_opts;
  auto* rep = app.add_subcommand("reproduce", "Emit the data behind a figure preset");
  rep->add_option("name", figure, "fig1, fig2, fig4 or fig6")->required();
  rep->add_option("--trials", fig_opts.trials)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (g.threads < 0) throw tts::ConfigError("--threads must be non-negative");
    if (g.threads > 0) tts::set_thread_count(g.threads);
    if (*synth) {
      gen.mode = tts::parse_generation_mode(gen_mode);
      run_synth(g, gen, gen_config);
    } else if (*fit) {
      run_fit(g, fit_corpus, fit_args, dump_cloud, want_w, w_mode);
    } else if (*ek) {
      run_estimate_k(g, ek_corpus, ek_alpha, ek_gn);
    } else if (*ev) {
      run_eval(g, ev_a, ev_truth, ev_w, ev_labels);
    } else if (*res) {
      run_resolution(g, res_corpus, res_args, splits, duplicate);
    } else if (*sw) {
      sweep_spec.varying = tts::parse_sweep_variable(vary);
      sweep_spec.grid = parse_grid(grid_text);
      sweep_spec.methods.clear();
      for (const auto& m : parse_grid_strings(methods_text)) sweep_spec.methods.push_back(tts::parse_sweep_method(m));
      sweep_spec.gen.mode = tts::parse_generation_mode(sweep_mode);
      sweep_spec.seed = g.seed;
      sweep_spec.validate();
      json c;
      c["vary"] = vary;
      c["grid"] = sweep_spec.grid;
      c["trials"] = sweep_spec.trials;
      c["methods"] = methods_text;
      c["estimate_k"] = sweep_spec.estimate_k;
      c["generation"] = json::parse(sweep_spec.gen.to_json());
      c["fit"] = json::parse(tts::fit_config_json(sweep_spec.fit));
      tts::write_manifest(g.out, "sweep", c.dump());
      const auto r = tts::run_sweep(sweep_spec, fs::path(g.out));
      std::cout << "wrote " << r.rows.size() << " rows to " << (fs::path(g.out) / "sweep_long.csv").string() << '\n';
    } else if (*rep) {
      const auto f = tts::parse_figure_name(figure);
      fig_opts.seed = g.seed;
      json c;
      c["figure"] = figure;
      c["trials"] = fig_opts.trials;
      c["seed"] = g.seed;
      tts::write_manifest(g.out, "reproduce", c.dump());
      for (const auto& p : tts::reproduce_figure(f, g.out, fig_opts)) std::cout << "wrote " << p.string() << '\n';
    }
  } catch (const tts::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const tts::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
