#include "tts/sweep.hpp"

#include "tts/eval.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <random>

namespace tts {

namespace fs = std::filesystem;

std::string to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::n: return "n";
    case SweepVariable::p: return "p";
    case SweepVariable::N: return "N";
    case SweepVariable::K: return "K";
    case SweepVariable::alpha: return "alpha";
    case SweepVariable::a_zipf: return "a_zipf";
    case SweepVariable::delta_anchor: return "delta_anchor";
  }
  return "n";
}

SweepVariable parse_sweep_variable(const std::string& name) {
  for (auto v : {SweepVariable::n, SweepVariable::p, SweepVariable::N, SweepVariable::K, SweepVariable::alpha,
                 SweepVariable::a_zipf, SweepVariable::delta_anchor})
    if (to_string(v) == name) return v;
  throw ConfigError("unknown sweep variable '" + name + "'");
}

std::string to_string(EstimatorKind e) {
  switch (e) {
    case EstimatorKind::tts: return "tts";
    case EstimatorKind::tts_alpha0: return "tts_alpha0";
    case EstimatorKind::topic_score: return "topic_score";
  }
  return "tts";
}

std::string SweepMethod::name() const { return to_string(estimator) + "/" + to_string(vh); }

SweepMethod parse_sweep_method(const std::string& text) {
  const auto slash = text.find('/');
  const std::string est = text.substr(0, slash);
  SweepMethod m;
  if (est == "tts") {
    m.estimator = EstimatorKind::tts;
  } else if (est == "tts_alpha0") {
    m.estimator = EstimatorKind::tts_alpha0;
  } else if (est == "topic_score") {
    m.estimator = EstimatorKind::topic_score;
  } else {
    throw ConfigError("unknown estimator '" + est + "' (expected tts, tts_alpha0 or topic_score)");
  }
  if (slash != std::string::npos) m.vh = parse_vertex_method(text.substr(slash + 1));
  return m;
}

void SweepSpec::validate() const {
  if (grid.empty()) throw ConfigError("sweep grid is empty");
  if (trials < 1) throw ConfigError("sweep needs at least one trial");
  if (methods.empty()) throw ConfigError("sweep needs at least one method");
  for (double v : grid) apply_sweep_value(gen, varying, v).validate();
}

std::uint64_t trial_seed(std::uint64_t master, int trial) {
  return child_seed(master, static_cast<std::uint64_t>(trial));
}

GenerationConfig apply_sweep_value(GenerationConfig gen, SweepVariable v, double value) {
  auto as_index = [&](const char* what) {
    if (!(value >= 1.0) || value != std::floor(value))
      throw ConfigError(std::string("sweep value for ") + what + " must be a positive integer");
    return static_cast<Index>(value);
  };
  switch (v) {
    case SweepVariable::n: gen.n = as_index("n"); break;
    case SweepVariable::p: gen.p = as_index("p"); break;
    case SweepVariable::N: gen.N = as_index("N"); break;
    case SweepVariable::K:
      gen.K = as_index("K");
      gen.dirichlet_alpha.clear();
      break;
    case SweepVariable::alpha: break;  // a fit parameter
    case SweepVariable::a_zipf: gen.a_zipf = value; break;
    case SweepVariable::delta_anchor: gen.delta_anchor = value; break;
  }
  return gen;
}

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, const std::optional<fs::path>& out_dir) {
  spec.validate();
  SweepResult res;
  for (double value : spec.grid) {
    const GenerationConfig base = apply_sweep_value(spec.gen, spec.varying, value);
    for (int t = 0; t < spec.trials; ++t) {
      GenerationConfig gen = base;
      gen.seed = trial_seed(spec.seed, t);
      std::optional<SyntheticCorpus> data;
      std::string gen_error;
      try {
        data = generate_corpus(gen);
      } catch (const std::exception& e) {
        gen_error = e.what();
      }
      for (const SweepMethod& m : spec.methods) {
        SweepRow row;
        row.value = value;
        row.trial = t;
        row.seed = gen.seed;
        row.method = m.name();
        row.loss = std::numeric_limits<double>::quiet_NaN();
        if (!data) {
          row.error = gen_error;
          res.rows.push_back(row);
          continue;
        }
        const auto t0 = Clock::now();
        try {
          FitConfig cfg = spec.fit;
          cfg.vh = m.vh;
          cfg.seed = child_seed(gen.seed, 99);
          cfg.spectrum_size = 0;
          if (spec.varying == SweepVariable::alpha) cfg.alpha = value;
          if (m.estimator == EstimatorKind::tts_alpha0) cfg.alpha = 0.0;
          cfg.k = spec.estimate_k ? std::nullopt : std::optional<Index>(gen.K);
          FitResult fit = m.estimator == EstimatorKind::topic_score ? fit_topic_score(data->corpus, gen.K, cfg)
                                                                    : fit_tts(data->corpus, cfg);
          row.removed_fraction = fit.diagnostics.removed_fraction;
          row.k_hat = fit.diagnostics.k_eigen;
          if (fit.k_used == gen.K) {
            row.loss = l1_permuted_loss(fit.a_hat, data->a);
          } else {
            row.error = "estimated K=" + std::to_string(fit.k_used) + " differs from true K=" + std::to_string(gen.K);
          }
        } catch (const std::exception& e) {
          row.error = e.what();
        }
        row.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        res.rows.push_back(row);
      }
    }
  }

  for (double value : spec.grid) {
    for (const SweepMethod& m : spec.methods) {
      SweepSummaryRow s;
      s.value = value;
      s.method = m.name();
      std::vector<double> losses, removed;
      for (const SweepRow& r : res.rows) {
        if (r.value != value || r.method != s.method) continue;
        if (std::isnan(r.loss)) {
          ++s.failed;
        } else {
          ++s.completed;
          losses.push_back(r.loss);
          removed.push_back(r.removed_fraction);
        }
      }
      s.median_loss = median_of(losses);
      s.iqr_loss = losses.empty() ? std::numeric_limits<double>::quiet_NaN() : iqr_of(losses);
      s.median_removed = median_of(removed);
      res.summary.push_back(s);
    }
  }

  if (out_dir) {
    fs::create_directories(*out_dir);
    write_sweep_long_csv(*out_dir / "sweep_long.csv", res, spec.varying);
    write_sweep_summary_csv(*out_dir / "sweep_summary.csv", res, spec.varying);
  }
  return res;
}

void write_sweep_long_csv(const fs::path& path, const SweepResult& r, SweepVariable v) {
  auto out = open_out(path);
  out << to_string(v) << ",trial,seed,method,l1_loss,removed_fraction,k_hat,seconds,error\n";
  for (const SweepRow& row : r.rows) {
    out << fmt(row.value) << ',' << row.trial << ',' << row.seed << ',' << row.method << ',' << fmt(row.loss) << ','
        << fmt(row.removed_fraction) << ',' << (row.k_hat ? std::to_string(*row.k_hat) : "") << ','
        << fmt(row.seconds) << ',' << csv_escape(row.error) << '\n';
  }
}

void write_sweep_summary_csv(const fs::path& path, const SweepResult& r, SweepVariable v) {
  auto out = open_out(path);
  out << to_string(v) << ",method,median_l1_loss,iqr_l1_loss,median_removed_fraction,completed,failed\n";
  for (const SweepSummaryRow& s : r.summary) {
    out << fmt(s.value) << ',' << s.method << ',' << fmt(s.median_loss) << ',' << fmt(s.iqr_loss) << ','
        << fmt(s.median_removed) << ',' << s.completed << ',' << s.failed << '\n';
  }
}

FigureName parse_figure_name(const std::string& name) {
  if (name == "fig1") return FigureName::fig1;
  if (name == "fig2") return FigureName::fig2;
  if (name == "fig4") return FigureName::fig4;
  if (name == "fig6") return FigureName::fig6;
  throw ConfigError("unknown figure '" + name + "' (expected fig1, fig2, fig4 or fig6)");
}

std::string to_string(FigureName f) {
  switch (f) {
    case FigureName::fig1: return "fig1";
    case FigureName::fig2: return "fig2";
    case FigureName::fig4: return "fig4";
    case FigureName::fig6: return "fig6";
  }
  return "fig1";
}

PlantedCloud planted_triangle_cloud(std::uint64_t seed, Index edge_points, Index interior_points) {
  PlantedCloud c;
  c.vertices.resize(3, 2);
  c.vertices << 0.0, 1.0, -0.8660254037844386, -0.5, 0.8660254037844386, -0.5;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> along(0.15, 0.85);
  std::gamma_distribution<double> gamma(1.0, 1.0);
  c.points.resize(3 * edge_points + interior_points, 2);
  Index row = 0;
  for (Index e = 0; e < 3; ++e) {
    const Index a = e, b = (e + 1) % 3;
    for (Index i = 0; i < edge_points; ++i) {
      const double t = along(rng);
      c.points.row(row++) = t * c.vertices.row(a) + (1.0 - t) * c.vertices.row(b);
      c.kind.push_back("edge");
    }
  }
  for (Index i = 0; i < interior_points;) {
    double w[3], total = 0.0;
    for (double& x : w) total += (x = gamma(rng));
    for (double& x : w) x /= total;
    if (std::max({w[0], w[1], w[2]}) > 0.8 || std::min({w[0], w[1], w[2]}) < 0.02) continue;
    c.points.row(row++) = w[0] * c.vertices.row(0) + w[1] * c.vertices.row(1) + w[2] * c.vertices.row(2);
    c.kind.push_back("interior");
    ++i;
  }
  return c;
}

SweepSpec figure_sweep_spec(FigureName f, const FigureOptions& opts) {
  SweepSpec s;
  s.trials = opts.trials;
  s.seed = opts.seed;
  s.gen.K = 3;
  s.gen.N = 500;
  if (f == FigureName::fig4) {
    s.varying = SweepVariable::n;
    s.grid = {250, 500, 1000, 2000};
    s.gen.p = 1000;
  } else if (f == FigureName::fig6) {
    s.varying = SweepVariable::alpha;
    s.grid = {0.0, 0.0025, 0.005, 0.01, 0.015, 0.02};
    s.gen.p = 5000;
    s.gen.n = 500;
  } else {
    throw ConfigError("figure " + to_string(f) + " is not a sweep");
  }
  return s;
}

std::vector<fs::path> reproduce_figure(FigureName f, const fs::path& out_dir, const FigureOptions& opts) {
  fs::create_directories(out_dir);
  std::vector<fs::path> written;
  if (f == FigureName::fig1) {
    const PlantedCloud c = planted_triangle_cloud(opts.seed);
    const auto cloud_path = out_dir / "fig1_cloud.csv";
    {
      auto out = open_out(cloud_path);
      out << "x,y,kind\n";
      for (Index j = 0; j < c.points.rows(); ++j)
        out << fmt(c.points(j, 0)) << ',' << fmt(c.points(j, 1)) << ',' << c.kind[j] << '\n';
    }
    const auto vert_path = out_dir / "fig1_vertices.csv";
    auto out = open_out(vert_path);
    out << "method,vertex,x,y,max_vertex_error\n";
    auto emit = [&](const std::string& name, const Matrix& v, double err) {
      for (Index k = 0; k < v.rows(); ++k)
        out << name << ',' << k + 1 << ',' << fmt(v(k, 0)) << ',' << fmt(v(k, 1)) << ',' << fmt(err) << '\n';
    };
    emit("truth", c.vertices, 0.0);
    const Matrix sp = successive_projection(c.points, 3).v;
    emit("sp", sp, vertex_error(sp, c.vertices));
    SvsConfig svs;
    svs.seed = child_seed(opts.seed, 1);
    const Matrix sv = sketched_vertex_search(c.points, 3, svs).v;
    emit("svs", sv, vertex_error(sv, c.vertices));
    AAConfig aa;
    aa.seed = child_seed(opts.seed, 2);
    const Matrix av = archetype_analysis(c.points, 3, aa).v;
    emit("aa", av, vertex_error(av, c.vertices));
    written = {cloud_path, vert_path};
  } else if (f == FigureName::fig2) {
    const auto path = out_dir / "fig2_scree.csv";
    auto out = open_out(path);
    out << "K,trial,seed,rank,eigenvalue,cutoff,k_hat,knee\n";
    for (Index k : {3, 5, 10}) {
      for (int t = 0; t < opts.trials; ++t) {
        GenerationConfig gen;
        gen.p = 5000;
        gen.n = 500;
        gen.N = 500;
        gen.K = k;
        gen.seed = trial_seed(opts.seed, t);
        const SyntheticCorpus data = generate_corpus(gen);
        const VocabularySubset j = threshold_vocabulary(data.corpus, 0.005);
        const GramBlock block = build_gram(data.corpus, j);
        const Vector vals = top_eigenvalues(block, 30);
        const double cut = eigen_cutoff(block, default_g_n(block));
        const Index kh = (vals.array() > cut).count();
        const KneeResult knee = kneedle_knee(std::vector<double>(vals.data(), vals.data() + vals.size()), true);
        for (Index r = 0; r < vals.size(); ++r)
          out << k << ',' << t << ',' << gen.seed << ',' << r + 1 << ',' << fmt(vals[r]) << ',' << fmt(cut) << ','
              << kh << ',' << knee.index << '\n';
      }
    }
    written = {path};
  } else {
    SweepSpec s = figure_sweep_spec(f, opts);
    const SweepResult r = run_sweep(s);
    const auto long_path = out_dir / (to_string(f) + "_long.csv");
    const auto sum_path = out_dir / (to_string(f) + "_summary.csv");
    write_sweep_long_csv(long_path, r, s.varying);
    write_sweep_summary_csv(sum_path, r, s.varying);
    written = {long_path, sum_path};
  }
  return written;
}

std::string fit_config_json(const FitConfig& cfg) {
  nlohmann::json j;
  j["k"] = cfg.k ? nlohmann::json(*cfg.k) : nlohmann::json("auto");
  j["alpha"] = cfg.alpha;
  j["vh"] = to_string(cfg.vh);
  j["svs_l"] = cfg.svs.centers;
  j["aa_lambda"] = cfg.aa.lambda ? nlohmann::json(*cfg.aa.lambda) : nlohmann::json("grid");
  j["aa_restarts"] = cfg.aa.restarts;
  j["g_n"] = cfg.g_n_mode == GnMode::fixed ? nlohmann::json(cfg.g_n_value) : nlohmann::json("8 log p_n");
  j["seed"] = cfg.seed;
  return j.dump();
}

void write_manifest(const fs::path& out_dir, const std::string& command, const std::string& config_json) {
  fs::create_directories(out_dir);
  nlohmann::json j;
  j["tool"] = "tts";
  j["version"] = TTS_VERSION;
  j["command"] = command;
  j["threads"] = thread_count();
  j["config"] = nlohmann::json::parse(config_json);
  auto out = open_out(out_dir / "manifest.json");
  out << j.dump(2) << '\n';
}

}  // namespace tts
