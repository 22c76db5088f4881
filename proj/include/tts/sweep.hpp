#pragma once

#include "tts/estimator.hpp"
#include "tts/synth.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace tts {

enum class SweepVariable { n, p, N, K, alpha, a_zipf, delta_anchor };
enum class EstimatorKind { tts, tts_alpha0, topic_score };

std::string to_string(SweepVariable v);
SweepVariable parse_sweep_variable(const std::string& name);
std::string to_string(EstimatorKind e);

struct SweepMethod {
  EstimatorKind estimator = EstimatorKind::tts;
  VertexMethod vh = VertexMethod::sp;
  std::string name() const;  // e.g. "tts/sp"
};

// Parses "tts/sp", "topic_score/aa", ...
SweepMethod parse_sweep_method(const std::string& text);

struct SweepSpec {
  SweepVariable varying = SweepVariable::n;
  std::vector<double> grid;
  GenerationConfig gen;
  FitConfig fit;
  int trials = 20;
  std::vector<SweepMethod> methods{SweepMethod{}};
  bool estimate_k = false;  // fit with K estimated instead of the true K
  std::uint64_t seed = 0;

  void validate() const;
};

struct SweepRow {
  double value = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::string method;
  double loss = 0.0;  // NaN when unavailable
  double removed_fraction = 0.0;
  std::optional<Index> k_hat;
  double seconds = 0.0;
  std::string error;
};

struct SweepSummaryRow {
  double value = 0.0;
  std::string method;
  double median_loss = 0.0;
  double iqr_loss = 0.0;
  double median_removed = 0.0;
  int completed = 0;
  int failed = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // grid-major, then trial, then method
  std::vector<SweepSummaryRow> summary;
};

// Trial t uses child_seed(master, t) at every grid point.
std::uint64_t trial_seed(std::uint64_t master, int trial);

GenerationConfig apply_sweep_value(GenerationConfig gen, SweepVariable v, double value);

/// Runs every grid point x trial x method. Per-trial failures are recorded,
/// never thrown. Writes sweep_long.csv and sweep_summary.csv when out_dir is set.
SweepResult run_sweep(const SweepSpec& spec, const std::optional<std::filesystem::path>& out_dir = std::nullopt);

void write_sweep_long_csv(const std::filesystem::path& path, const SweepResult& r, SweepVariable v);
void write_sweep_summary_csv(const std::filesystem::path& path, const SweepResult& r, SweepVariable v);

enum class FigureName { fig1, fig2, fig4, fig6 };
FigureName parse_figure_name(const std::string& name);
std::string to_string(FigureName f);

/// Planted triangle with edge and interior points but none near a vertex.
struct PlantedCloud {
  Matrix vertices;  // 3 x 2
  Matrix points;    // m x 2
  std::vector<std::string> kind;  // "edge" or "interior"
};
PlantedCloud planted_triangle_cloud(std::uint64_t seed, Index edge_points = 60, Index interior_points = 300);

struct FigureOptions {
  std::uint64_t seed = 0;
  int trials = 20;
};

SweepSpec figure_sweep_spec(FigureName f, const FigureOptions& opts);  // fig4 and fig6

/// Writes the CSV bundle behind the named figure into out_dir and returns the
/// list of files written.
std::vector<std::filesystem::path> reproduce_figure(FigureName f, const std::filesystem::path& out_dir,
                                                    const FigureOptions& opts = {});

/// manifest.json: command, resolved configuration and library version.
void write_manifest(const std::filesystem::path& out_dir, const std::string& command, const std::string& config_json);

std::string fit_config_json(const FitConfig& cfg);

}  // namespace tts
