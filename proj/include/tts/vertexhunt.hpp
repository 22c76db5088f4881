#pragma once

#include "tts/common.hpp"
#include "tts/score.hpp"

#include <optional>
#include <string>

namespace tts {

enum class VertexMethod { sp, svs, aa };

std::string to_string(VertexMethod method);
VertexMethod parse_vertex_method(const std::string& name);

struct SimplexVertices {
  Matrix v;  // K x (K - 1), row k is vertex k
  VertexMethod method = VertexMethod::sp;
  bool degenerate = false;
  int iterations = 0;
  double objective = 0.0;  // AA only
  double lambda = 0.0;     // AA only: the weight that was used
  std::vector<Index> source_rows;  // SP: cloud rows chosen
  std::vector<double> objective_trace;  // AA: accepted objective values of the winning run
};

/// Smallest singular value of [1; V^T] below tol.
bool simplex_is_degenerate(const Matrix& v, double tol = 1e-10);

/// Greedy successive projection on the augmented rows (1, r_j).
SimplexVertices successive_projection(const Matrix& points, Index k);
SimplexVertices successive_projection(const PointCloud& cloud, Index k);

struct SvsConfig {
  Index centers = 0;  // L; 0 means 10 K capped at the cloud size
  std::uint64_t seed = 0;
  int kmeans_iterations = 100;
  double subset_budget = 2e6;
};

// Lloyd's k-means with k-means++ seeding. Returns L x d centers.
Matrix kmeans_centers(const Matrix& points, Index centers, std::uint64_t seed, int iterations);

SimplexVertices sketched_vertex_search(const Matrix& points, Index k, const SvsConfig& cfg = {});
SimplexVertices sketched_vertex_search(const PointCloud& cloud, Index k, const SvsConfig& cfg = {});

struct AAConfig {
  std::optional<double> lambda;  // fixed Lagrange weight
  double delta = 0.0;            // > 0 selects the constrained form when lambda is unset
  std::vector<double> lambda_grid{0.1, 1.0, 10.0};
  int max_outer_iters = 300;
  int max_inner_iters = 0;  // simplex solver cap, 0 = its default
  double tol = 1e-9;        // relative objective decrease
  int restarts = 5;
  std::uint64_t seed = 0;
};

/// Lagrangian objective  sum_j D(r_j; V) + lambda sum_k D(v_k; R).
double aa_objective(const Matrix& points, const Matrix& v, double lambda);

/// Alternating minimization for one lambda, from the given start.
SimplexVertices archetype_fit(const Matrix& points, const Matrix& start, double lambda, const AAConfig& cfg);

SimplexVertices archetype_analysis(const Matrix& points, Index k, const AAConfig& cfg = {});
SimplexVertices archetype_analysis(const PointCloud& cloud, Index k, const AAConfig& cfg = {});

/// max_k ||v_hat_sigma(k) - v_k|| under the distance-minimizing matching.
double vertex_error(const Matrix& estimate, const Matrix& truth);

}  // namespace tts
