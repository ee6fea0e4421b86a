#pragma once

// Almost mutually orthogonal projections generating M_k of a unital matrix
// algebra. Generators are packed into the strictly upper blocks of a block
// matrix T_ε with identity diagonal, and p_i = T_ε^{1/2} (1⊗e_ii) T_ε^{1/2}.
// Every quantitative claim of the construction is measured and reported.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "projgen/algebra.hpp"
#include "projgen/errors.hpp"
#include "projgen/linalg.hpp"

namespace projgen {

struct Tolerances {
  double projection = 1e-9;  // self-adjointness / idempotency residuals
  double slack = 1e-9;       // additive slack on every bound check
  double identity = 1e-10;   // algebraic identities such as Σ p_i = T
  double rank = 1e-9;        // span closure rank decisions
  double membership = 1e-8;  // contains() threshold
};

/// min{k : (k−1)(k−2) ≥ 2n}.
inline std::size_t delta(std::size_t n) {
  if (n == 0) throw precondition_error("delta: need at least one generator");
  std::size_t k = 3;
  while ((k - 1) * (k - 2) < 2 * n) ++k;
  return k;
}

/// Least l ≥ 1 with l² + 1 ≥ n, i.e. ⌈√(n−1)⌉ clamped to at least one.
inline std::size_t min_amplification(std::size_t n) {
  std::size_t l = 1;
  while (l * l + 1 < n) ++l;
  return l;
}

inline double max_admissible_epsilon(std::size_t k) { return 1.0 / (8.0 * double(k - 1)); }
inline double default_epsilon(std::size_t k) { return 1.0 / (16.0 * double(k - 1)); }

/// Slot (row, col), 0-based with row < col ≤ k−2, holding either a source
/// generator or the unit.
struct Slot {
  std::size_t row = 0;
  std::size_t col = 0;
  std::optional<std::size_t> generator;  // index into source generators; empty = unit
};

struct PackingPlan {
  std::size_t k = 0;
  std::vector<Slot> slots;  // lexicographic in (row, col)
  std::size_t source_count = 0;
};

/// Fills the (k−1)(k−2)/2 slots in lexicographic order with a_1, ..., a_n,
/// padding the rest with the unit.
inline PackingPlan pack(const GeneratorSet& g, std::size_t k) {
  if (!g.normalized) throw precondition_error("pack: generators must be normalized");
  const std::size_t n = g.source_count();
  if (k < 3 || k < delta(std::max<std::size_t>(n, 1))) {
    throw precondition_error("pack: k = " + std::to_string(k) + " is below delta(" +
                             std::to_string(n) + ")");
  }
  PackingPlan plan;
  plan.k = k;
  plan.source_count = n;
  std::size_t next = 0;
  for (std::size_t i = 0; i + 1 < k - 1; ++i) {
    for (std::size_t j = i + 1; j < k - 1; ++j) {
      Slot s{i, j, std::nullopt};
      if (next < n) s.generator = next++;
      plan.slots.push_back(s);
    }
  }
  return plan;
}

/// Strictly upper blocks B_ij (i < j < k) of a k x k block matrix with
/// identity diagonal, stored row-major.
struct UpperBlocks {
  std::size_t k = 0;
  std::size_t d = 0;
  std::vector<ComplexMatrix> blocks;

  static std::size_t index(std::size_t k, std::size_t i, std::size_t j) {
    // Offset of row i is Σ_{r<i} (k−1−r).
    return i * (2 * k - i - 1) / 2 + (j - i - 1);
  }
  const ComplexMatrix& at(std::size_t i, std::size_t j) const { return blocks[index(k, i, j)]; }

  void validate() const {
    if (k < 2) throw precondition_error("block matrix needs k >= 2");
    if (blocks.size() != k * (k - 1) / 2) throw precondition_error("wrong number of blocks");
    for (const auto& b : blocks)
      if (b.rows() != d || b.cols() != d) throw precondition_error("block has wrong size");
  }

  double eta() const {
    double e = 0.0;
    for (const auto& b : blocks) e = std::max(e, operator_norm(b));
    return e;
  }

  /// [1, B_12, ...; B_12*, 1, ...; ...]
  ComplexMatrix assemble() const {
    validate();
    ComplexMatrix t = ComplexMatrix::identity(k * d);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        const ComplexMatrix& b = at(i, j);
        for (std::size_t r = 0; r < d; ++r) {
          for (std::size_t c = 0; c < d; ++c) {
            t(i * d + r, j * d + c) = b(r, c);
            t(j * d + c, i * d + r) = std::conj(b(r, c));
          }
        }
      }
    }
    return t;
  }
};

/// The assembled T_ε with its cached square roots.
struct TEpsilon {
  std::size_t k = 0;
  double epsilon = 0.0;
  double eta = 0.0;
  std::size_t block_dim = 0;
  PackingPlan plan;
  std::vector<ComplexMatrix> slot_blocks;  // normalized B_ij per plan slot (unscaled)
  UpperBlocks blocks;                      // ε-scaled upper blocks, including the ε·1 column
  ComplexMatrix matrix;
  ComplexMatrix sqrt;
  ComplexMatrix inv_sqrt;
};

inline TEpsilon assemble_T(const PackingPlan& plan, const GeneratorSet& g, double epsilon) {
  g.validate();
  const std::size_t k = plan.k;
  if (k < 3) throw precondition_error("assemble_T: k must be at least 3");
  if (!(epsilon > 0.0 && epsilon < max_admissible_epsilon(k))) {
    throw precondition_error("assemble_T: epsilon " + std::to_string(epsilon) +
                             " outside (0, 1/(8(k-1))) = (0, " +
                             std::to_string(max_admissible_epsilon(k)) + ")");
  }
  const std::size_t d = g.dim;
  const auto sources = g.source_generators();
  const ComplexMatrix unit = ComplexMatrix::identity(d);

  TEpsilon t;
  t.k = k;
  t.epsilon = epsilon;
  t.block_dim = d;
  t.plan = plan;
  t.blocks.k = k;
  t.blocks.d = d;
  t.blocks.blocks.assign(k * (k - 1) / 2, ComplexMatrix(d, d));

  for (const Slot& s : plan.slots) {
    ComplexMatrix b = unit;
    if (s.generator) {
      if (*s.generator >= sources.size()) throw precondition_error("assemble_T: bad slot");
      b = sources[*s.generator];
      if (std::abs(operator_norm(b) - 1.0) > 1e-12) {
        throw precondition_error("assemble_T: generator " + std::to_string(*s.generator) +
                                 " is not normalized");
      }
    }
    t.blocks.blocks[UpperBlocks::index(k, s.row, s.col)] = b * Complex(epsilon);
    t.slot_blocks.push_back(std::move(b));
  }
  for (std::size_t i = 0; i + 1 < k; ++i) {
    t.blocks.blocks[UpperBlocks::index(k, i, k - 1)] = unit * Complex(epsilon);
  }
  t.eta = t.blocks.eta();
  t.matrix = t.blocks.assemble();
  t.sqrt = matrix_power_half(t.matrix, HalfPower::sqrt);
  t.inv_sqrt = matrix_power_half(t.matrix, HalfPower::inv_sqrt);
  return t;
}

/// Measurements behind the block-matrix positivity lemma: diagonal
/// dominance of the norm comparison matrix, λ_min > 0, ‖T − 1‖ ≤ (k−1)η and
/// ‖T^{−1/2} − 1‖ ≤ 2(k−1)η.
struct LemmaCertificate {
  std::size_t k = 0;
  double eta = 0.0;
  double dominance_margin = 0.0;  // min_i (1 − Σ_{j≠i} ‖B_ij‖)
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double interval_low = 0.0;   // 1 − (k−1)η
  double interval_high = 0.0;  // 1 + (k−1)η
  double norm_T_minus_1 = 0.0;
  double norm_inv_sqrt_minus_1 = 0.0;
  double bound_T = 0.0;         // (k−1)η
  double bound_inv_sqrt = 0.0;  // 2(k−1)η
  bool dominance_ok = false;
  bool positive_ok = false;
  bool spectrum_ok = false;
  bool norm_ok = false;
  bool inv_sqrt_ok = false;
  bool passed = false;
  std::string violation;
};

inline LemmaCertificate lemma_certificate(const UpperBlocks& blocks, double slack = 1e-9) {
  blocks.validate();
  const std::size_t k = blocks.k;
  LemmaCertificate c;
  c.k = k;
  c.eta = blocks.eta();
  if (!(c.eta < 1.0 / (2.0 * double(k - 1)))) {
    throw precondition_error("lemma_certificate: eta = " + std::to_string(c.eta) +
                             " violates eta < 1/(2(k-1))");
  }

  std::vector<double> row_sums(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double n = operator_norm(blocks.at(i, j));
      row_sums[i] += n;
      row_sums[j] += n;
    }
  }
  c.dominance_margin = 1.0 - *std::max_element(row_sums.begin(), row_sums.end());
  c.dominance_ok = c.dominance_margin > 0.0;

  const ComplexMatrix t = blocks.assemble();
  const std::size_t n = t.rows();
  const Spectrum spec = hermitian_eig(t);
  c.lambda_min = spec.min();
  c.lambda_max = spec.max();
  c.positive_ok = c.lambda_min > 0.0;

  const double spread = double(k - 1) * c.eta;
  c.interval_low = 1.0 - spread;
  c.interval_high = 1.0 + spread;
  c.spectrum_ok = c.lambda_min >= c.interval_low - slack && c.lambda_max <= c.interval_high + slack;

  c.bound_T = spread;
  c.bound_inv_sqrt = 2.0 * spread;
  c.norm_T_minus_1 = operator_norm(t - ComplexMatrix::identity(n));
  c.norm_ok = c.norm_T_minus_1 <= c.bound_T + slack;
  if (c.positive_ok) {
    const ComplexMatrix inv_sqrt = spec.apply([](double x) { return 1.0 / std::sqrt(x); });
    c.norm_inv_sqrt_minus_1 = operator_norm(inv_sqrt - ComplexMatrix::identity(n));
    c.inv_sqrt_ok = c.norm_inv_sqrt_minus_1 <= c.bound_inv_sqrt + slack;
  }

  c.passed = c.dominance_ok && c.positive_ok && c.spectrum_ok && c.norm_ok && c.inv_sqrt_ok;
  if (!c.dominance_ok) {
    c.violation = "diagonal dominance margin " + std::to_string(c.dominance_margin);
  } else if (!c.positive_ok) {
    c.violation = "lambda_min " + std::to_string(c.lambda_min);
  } else if (!c.spectrum_ok) {
    c.violation = "spectrum outside [1-(k-1)eta, 1+(k-1)eta]";
  } else if (!c.norm_ok) {
    c.violation = "||T-1|| = " + std::to_string(c.norm_T_minus_1);
  } else if (!c.inv_sqrt_ok) {
    c.violation = "||T^-1/2 - 1|| = " + std::to_string(c.norm_inv_sqrt_minus_1);
  }
  return c;
}

inline LemmaCertificate lemma1_certificate(const TEpsilon& t, double slack = 1e-9) {
  return lemma_certificate(t.blocks, slack);
}

struct ProjectionFamily {
  std::size_t k = 0;
  std::vector<ComplexMatrix> projections;     // p_i(ε)
  std::vector<ComplexMatrix> diagonal_units;  // I_i = 1 ⊗ e_ii
  TEpsilon source;
};

inline std::vector<ComplexMatrix> diagonal_units(std::size_t k, std::size_t d) {
  std::vector<ComplexMatrix> units;
  units.reserve(k);
  for (std::size_t i = 0; i < k; ++i) units.push_back(embed_block(ComplexMatrix::identity(d), i, i, k));
  return units;
}

inline ProjectionFamily build_projections(const TEpsilon& t, const Tolerances& tol = {}) {
  ProjectionFamily f;
  f.k = t.k;
  f.diagonal_units = diagonal_units(t.k, t.block_dim);
  for (std::size_t i = 0; i < t.k; ++i) {
    ComplexMatrix p = hermitian_part(t.sqrt * f.diagonal_units[i] * t.sqrt);
    const ProjectionResiduals r = residuals(p);
    if (r.max() > tol.projection) {
      throw numerical_error("build_projections: p_" + std::to_string(i + 1) +
                            " residual " + std::to_string(r.max()) + " exceeds tolerance");
    }
    f.projections.push_back(std::move(p));
  }
  f.source = t;
  return f;
}

/// Rebuilds a family from its projections alone: T = Σ p_i, the upper
/// blocks of T divided by ε give back the packed generators.
inline ProjectionFamily recover_family(const std::vector<ComplexMatrix>& projections,
                                       std::size_t k, double epsilon,
                                       double identity_tol = 1e-8) {
  if (k < 3 || projections.size() != k) {
    throw precondition_error("recover_family: need k >= 3 projections");
  }
  if (!(epsilon > 0.0 && epsilon < max_admissible_epsilon(k))) {
    throw precondition_error("recover_family: epsilon outside (0, 1/(8(k-1)))");
  }
  const std::size_t n = projections.front().rows();
  if (n % k != 0) throw precondition_error("recover_family: dimension is not a multiple of k");
  const std::size_t d = n / k;

  TEpsilon t;
  t.k = k;
  t.epsilon = epsilon;
  t.block_dim = d;
  t.matrix = ComplexMatrix(n, n);
  for (const auto& p : projections) t.matrix += p;
  t.matrix = hermitian_part(t.matrix);
  t.blocks.k = k;
  t.blocks.d = d;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) t.blocks.blocks.push_back(extract_block(t.matrix, i, j, d));
  t.eta = t.blocks.eta();
  // A family that does not sum to a matrix of T_ε's shape fails verification
  // rather than violating a precondition.
  for (std::size_t i = 0; i < k; ++i) {
    const double r = operator_norm(extract_block(t.matrix, i, i, d) - ComplexMatrix::identity(d));
    if (r > identity_tol) {
      throw numerical_error("recover_family: diagonal block " + std::to_string(i) +
                            " of the projection sum is not the identity");
    }
  }
  if (t.eta >= 1.0 / (2.0 * double(k - 1))) {
    throw numerical_error("recover_family: off-diagonal blocks too large for T_epsilon");
  }
  t.plan.k = k;
  for (std::size_t i = 0; i + 1 < k - 1; ++i) {
    for (std::size_t j = i + 1; j < k - 1; ++j) {
      t.plan.slots.push_back({i, j, std::nullopt});
      t.slot_blocks.push_back(t.blocks.at(i, j) * Complex(1.0 / epsilon));
    }
  }
  t.sqrt = matrix_power_half(t.matrix, HalfPower::sqrt);
  t.inv_sqrt = matrix_power_half(t.matrix, HalfPower::inv_sqrt);

  ProjectionFamily f;
  f.k = k;
  f.projections = projections;
  f.diagonal_units = diagonal_units(k, d);
  f.source = std::move(t);
  return f;
}

struct BoundsReport {
  std::size_t k = 0;
  double epsilon = 0.0;
  double eta = 0.0;
  double lemma_low = 0.0;   // 1 − (k−1)η
  double lemma_high = 0.0;  // 1 + (k−1)η
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double norm_T_minus_1 = 0.0;
  double norm_inv_sqrt_minus_1 = 0.0;
  double max_projection_residual = 0.0;
  double sum_identity_residual = 0.0;  // ‖Σ p_i − T‖
  std::vector<std::vector<double>> pairwise_products;  // ‖p_i p_j‖, zero on the diagonal
  std::vector<double> distances_to_units;              // ‖p_j − I_j‖
  double max_pairwise_product = 0.0;
  double max_distance_to_unit = 0.0;
  double bound_16 = 0.0;  // 16(k−1)ε
  double bound_8 = 0.0;   // 8(k−1)ε
  bool spectrum_pass = false;
  bool norm_pass = false;
  bool inv_sqrt_pass = false;
  bool invertible_pass = false;
  bool projection_pass = false;
  bool sum_pass = false;
  bool pairwise_pass = false;
  bool distance_pass = false;
  bool all_pass = false;
};

/// Measures every bound of the construction. Failures are recorded, not thrown.
inline BoundsReport verify_family(const ProjectionFamily& f, const Tolerances& tol = {}) {
  const TEpsilon& t = f.source;
  const std::size_t k = f.k;
  const std::size_t n = t.matrix.rows();
  BoundsReport r;
  r.k = k;
  r.epsilon = t.epsilon;
  r.eta = t.eta;
  const double spread = double(k - 1) * t.eta;
  r.lemma_low = 1.0 - spread;
  r.lemma_high = 1.0 + spread;

  const SpectrumBounds sb = spectrum_bounds(t.matrix);
  r.lambda_min = sb.min;
  r.lambda_max = sb.max;
  r.spectrum_pass = sb.min >= r.lemma_low - tol.slack && sb.max <= r.lemma_high + tol.slack;
  r.invertible_pass = r.lemma_low > 0.0 && sb.min > 0.0;

  const ComplexMatrix one = ComplexMatrix::identity(n);
  r.norm_T_minus_1 = operator_norm(t.matrix - one);
  r.norm_pass = r.norm_T_minus_1 <= spread + tol.slack;
  r.norm_inv_sqrt_minus_1 = operator_norm(t.inv_sqrt - one);
  r.inv_sqrt_pass = r.norm_inv_sqrt_minus_1 <= 2.0 * spread + tol.slack;

  ComplexMatrix sum(n, n);
  for (const auto& p : f.projections) {
    r.max_projection_residual = std::max(r.max_projection_residual, residuals(p).max());
    sum += p;
  }
  r.projection_pass = r.max_projection_residual <= tol.projection;
  r.sum_identity_residual = operator_norm(sum - t.matrix);
  r.sum_pass = r.sum_identity_residual <= tol.identity;

  r.bound_16 = 16.0 * double(k - 1) * t.epsilon;
  r.bound_8 = 8.0 * double(k - 1) * t.epsilon;
  r.pairwise_products.assign(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const double v = operator_norm(f.projections[i] * f.projections[j]);
      r.pairwise_products[i][j] = v;
      r.max_pairwise_product = std::max(r.max_pairwise_product, v);
    }
    const double dist = operator_norm(f.projections[i] - f.diagonal_units[i]);
    r.distances_to_units.push_back(dist);
    r.max_distance_to_unit = std::max(r.max_distance_to_unit, dist);
  }
  r.pairwise_pass = r.max_pairwise_product < r.bound_16 + tol.slack;
  r.distance_pass = r.max_distance_to_unit < r.bound_8 + tol.slack && r.max_distance_to_unit < 1.0;

  r.all_pass = r.spectrum_pass && r.norm_pass && r.inv_sqrt_pass && r.invertible_pass &&
               r.projection_pass && r.sum_pass && r.pairwise_pass && r.distance_pass;
  return r;
}

struct OrthogonalFamily {
  std::vector<ComplexMatrix> projections;  // exact 0/1 diagonal units
  double max_reconstruction_residual = 0.0;  // max_i ‖T^{−1/2} p_i T^{−1/2} − I_i‖
  std::vector<double> distances;              // ‖p_i − I_i‖
};

/// Recovers the mutually orthogonal units I_i = T^{−1/2} p_i T^{−1/2}.
inline OrthogonalFamily orthogonalize(const ProjectionFamily& f, const Tolerances& tol = {}) {
  OrthogonalFamily out;
  const ComplexMatrix& w = f.source.inv_sqrt;
  for (std::size_t i = 0; i < f.k; ++i) {
    const ComplexMatrix recovered = w * f.projections[i] * w;
    const double res = operator_norm(recovered - f.diagonal_units[i]);
    out.max_reconstruction_residual = std::max(out.max_reconstruction_residual, res);
    const double dist = operator_norm(f.projections[i] - f.diagonal_units[i]);
    if (dist >= 1.0) {
      throw precondition_error("orthogonalize: ||p_" + std::to_string(i + 1) +
                               " - I|| = " + std::to_string(dist) + " >= 1");
    }
    out.distances.push_back(dist);
  }
  if (out.max_reconstruction_residual > tol.projection) {
    throw numerical_error("orthogonalize: T^-1/2 p_i T^-1/2 misses the diagonal unit by " +
                          std::to_string(out.max_reconstruction_residual));
  }
  out.projections = f.diagonal_units;
  return out;
}

/// Unitary U with U p U* = q for projections at distance below one:
/// U = v (v*v)^{−1/2} with v = qp + (1−q)(1−p).
inline ComplexMatrix unitary_intertwiner(const ComplexMatrix& p, const ComplexMatrix& q,
                                         double projection_tol = 1e-9) {
  if (!p.is_square() || p.rows() != q.rows() || p.cols() != q.cols()) {
    throw precondition_error("unitary_intertwiner: shape mismatch");
  }
  if (residuals(p).max() > projection_tol || residuals(q).max() > projection_tol) {
    throw precondition_error("unitary_intertwiner: inputs are not projections");
  }
  const double dist = operator_norm(p - q);
  if (dist >= 1.0) {
    throw precondition_error("unitary_intertwiner: ||p - q|| = " + std::to_string(dist) + " >= 1");
  }
  const ComplexMatrix one = ComplexMatrix::identity(p.rows());
  const ComplexMatrix v = q * p + (one - q) * (one - p);
  const ComplexMatrix vv = hermitian_part(v.adjoint() * v);
  ComplexMatrix inv_abs;
  try {
    inv_abs = matrix_power_half(vv, HalfPower::inv_sqrt, 1e-12);
  } catch (const precondition_error&) {
    throw numerical_error("unitary_intertwiner: v*v is singular");
  }
  return v * inv_abs;
}

/// ‖U p U* − q‖
inline double conjugation_residual(const ComplexMatrix& u, const ComplexMatrix& p,
                                   const ComplexMatrix& q) {
  return operator_norm(u * p * u.adjoint() - q);
}

/// ‖U*U − 1‖
inline double unitarity_residual(const ComplexMatrix& u) {
  return operator_norm(u.adjoint() * u - ComplexMatrix::identity(u.rows()));
}

/// Block permutation unitary swapping block rows i and j of a k x k block
/// matrix with d x d blocks. It conjugates 1⊗e_ii to 1⊗e_jj.
inline ComplexMatrix block_swap(std::size_t k, std::size_t d, std::size_t i, std::size_t j) {
  ComplexMatrix u(k * d, k * d);
  for (std::size_t b = 0; b < k; ++b) {
    const std::size_t target = b == i ? j : (b == j ? i : b);
    for (std::size_t r = 0; r < d; ++r) u(target * d + r, b * d + r) = 1.0;
  }
  return u;
}

struct EquivalenceReport {
  // U_j = W_j* S_j W_1 conjugates p_1 to p_j, where W_i intertwines p_i
  // with I_i and S_j swaps I_1 with I_j.
  std::vector<double> unitarity_residuals;
  std::vector<double> conjugation_residuals;
  double max_unitarity_residual = 0.0;
  double max_conjugation_residual = 0.0;
  bool pass = false;
};

/// Exhibits explicit unitaries carrying p_1 to each p_j.
inline EquivalenceReport check_equivalence(const std::vector<ComplexMatrix>& projections,
                                           const std::vector<ComplexMatrix>& units,
                                           std::size_t block_dim,
                                           const Tolerances& tol = {}) {
  EquivalenceReport r;
  const std::size_t k = projections.size();
  std::vector<ComplexMatrix> to_unit;
  to_unit.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    to_unit.push_back(unitary_intertwiner(projections[i], units[i], tol.projection));
  }
  for (std::size_t j = 0; j < k; ++j) {
    const ComplexMatrix u =
        to_unit[j].adjoint() * block_swap(k, block_dim, 0, j) * to_unit[0];
    const double ures = unitarity_residual(u);
    const double cres = conjugation_residual(u, projections[0], projections[j]);
    r.unitarity_residuals.push_back(ures);
    r.conjugation_residuals.push_back(cres);
    r.max_unitarity_residual = std::max(r.max_unitarity_residual, ures);
    r.max_conjugation_residual = std::max(r.max_conjugation_residual, cres);
  }
  r.pass = r.max_unitarity_residual <= 1e-10 && r.max_conjugation_residual <= 1e-8;
  return r;
}

struct MembershipTrace {
  std::string label;
  bool member = false;
  double residual = 0.0;
};

struct GenerationReport {
  std::size_t family_closure_dim = 0;
  std::size_t source_closure_dim = 0;
  std::size_t expected_dim = 0;  // k² · source_closure_dim
  bool dims_match = false;
  std::vector<MembershipTrace> memberships;
  bool all_members = false;
  bool pass = false;
};

/// Compares the *-algebra generated by the family with M_k of the unitized
/// source algebra and replays the membership chain 1⊗e_ij, B_ij⊗e_ij.
inline GenerationReport check_generation(const ProjectionFamily& f, const GeneratorSet& g,
                                         const Tolerances& tol = {}) {
  const TEpsilon& t = f.source;
  const std::size_t k = f.k;
  const std::size_t d = t.block_dim;
  if (g.dim != d || t.matrix.rows() != k * d) {
    throw precondition_error("check_generation: family and source dimensions disagree");
  }
  ClosureOptions opts;
  opts.rank_tol = tol.rank;

  GenerationReport r;
  const StarClosure source = star_closure(unitize(g).generators, opts);
  const StarClosure family = star_closure(f.projections, opts);
  r.source_closure_dim = source.dimension();
  r.family_closure_dim = family.dimension();
  r.expected_dim = k * k * r.source_closure_dim;
  r.dims_match = r.family_closure_dim == r.expected_dim;

  const ComplexMatrix unit = ComplexMatrix::identity(d);
  auto record = [&](std::string label, const ComplexMatrix& m) {
    const Membership mem = contains(family, m, tol.membership);
    r.memberships.push_back({std::move(label), mem.member, mem.residual});
  };
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      record("1(x)e_" + std::to_string(i + 1) + std::to_string(j + 1), embed_block(unit, i, j, k));
  for (std::size_t s = 0; s < t.plan.slots.size(); ++s) {
    const Slot& slot = t.plan.slots[s];
    record("B_" + std::to_string(slot.row + 1) + std::to_string(slot.col + 1) + "(x)e_" +
               std::to_string(slot.row + 1) + std::to_string(slot.col + 1),
           embed_block(t.slot_blocks[s], slot.row, slot.col, k));
  }
  r.all_members = std::all_of(r.memberships.begin(), r.memberships.end(),
                              [](const MembershipTrace& m) { return m.member; });
  r.pass = r.dims_match && r.all_members;
  return r;
}

struct TwoProjectionReport {
  double epsilon = 0.0;
  ComplexMatrix p1;
  ComplexMatrix p2;
  double product_norm = 0.0;        // ‖p1 p2‖, equal to √ε
  double lambda_min_sum = 0.0;      // λ_min(p1 + p2)
  std::size_t closure_dim = 0;      // 4: all of M_2
  ComplexMatrix intertwiner;        // U p1 U* = p2
  double intertwiner_residual = 0.0;
  double unitarity_residual = 0.0;
};

/// The explicit pair in M_2(C): p1 = e_11 and p2 the projection onto
/// (√ε, √(1−ε)).
inline TwoProjectionReport two_projection_example(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw precondition_error("two_projection_example: epsilon must lie in (0, 1)");
  }
  TwoProjectionReport r;
  r.epsilon = epsilon;
  const double off = std::sqrt(epsilon * (1.0 - epsilon));
  r.p1 = ComplexMatrix::unit(2, 0, 0);
  r.p2 = ComplexMatrix::from_entries(2, 2, {epsilon, off, off, 1.0 - epsilon});
  r.product_norm = operator_norm(r.p1 * r.p2);
  r.lambda_min_sum = spectrum_bounds(r.p1 + r.p2).min;
  r.closure_dim = star_closure({r.p1, r.p2}).dimension();
  r.intertwiner = unitary_intertwiner(r.p1, r.p2);
  r.intertwiner_residual = conjugation_residual(r.intertwiner, r.p1, r.p2);
  r.unitarity_residual = projgen::unitarity_residual(r.intertwiner);
  return r;
}

/// Everything the construct command computes for one (G, k, ε).
struct PipelineResult {
  GeneratorSet source;  // as given
  GeneratorSet prepared;  // normalized and unitized
  std::size_t delta_n = 0;
  std::size_t k = 0;
  double epsilon = 0.0;
  TEpsilon t;
  LemmaCertificate lemma;
  ProjectionFamily family;
  BoundsReport bounds;
  EquivalenceReport equivalence;
  std::optional<GenerationReport> generation;
  bool pass = false;
};

struct PipelineOptions {
  std::optional<std::size_t> k;
  std::optional<double> epsilon;
  bool check_generation = true;
  Tolerances tol;
};

/// normalize → unitize → delta → pack → assemble_T → build_projections →
/// verify_family → check_generation.
inline PipelineResult run_pipeline(const GeneratorSet& g, const PipelineOptions& options = {}) {
  g.validate();
  PipelineResult r;
  r.source = g;
  r.prepared = unitize(normalize(g));
  const std::size_t n = r.prepared.source_count();
  r.delta_n = delta(n);
  r.k = options.k.value_or(r.delta_n);
  if (r.k < r.delta_n) {
    throw precondition_error("k = " + std::to_string(r.k) + " is below delta(n) = " +
                             std::to_string(r.delta_n));
  }
  r.epsilon = options.epsilon.value_or(default_epsilon(r.k));
  const PackingPlan plan = pack(r.prepared, r.k);
  r.t = assemble_T(plan, r.prepared, r.epsilon);
  r.lemma = lemma1_certificate(r.t, options.tol.slack);
  r.family = build_projections(r.t, options.tol);
  r.bounds = verify_family(r.family, options.tol);
  r.equivalence = check_equivalence(r.family.projections, r.family.diagonal_units,
                                    r.t.block_dim, options.tol);
  r.pass = r.lemma.passed && r.bounds.all_pass && r.equivalence.pass;
  if (options.check_generation) {
    r.generation = check_generation(r.family, g, options.tol);
    r.pass = r.pass && r.generation->pass;
  }
  return r;
}

}  // namespace projgen
