#pragma once

// Finitely generated *-algebras of matrices and the span-closure fixpoint
// that decides what a set of matrices generates.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "projgen/errors.hpp"
#include "projgen/linalg.hpp"

namespace projgen {

/// Generators a_1, ..., a_n of a concrete *-algebra inside M_dim(C).
///
/// When `unital` is set the last generator is the adjoined identity
/// (see unitize); it is not counted among the source generators.
struct GeneratorSet {
  std::size_t dim = 0;
  std::vector<ComplexMatrix> generators;
  bool unital = false;
  bool normalized = false;

  void validate() const {
    for (const auto& g : generators) {
      if (g.rows() != dim || g.cols() != dim) {
        throw precondition_error("generator is not " + std::to_string(dim) + "x" +
                                 std::to_string(dim));
      }
    }
    if (unital && generators.empty()) {
      throw precondition_error("unital generator set without its unit");
    }
  }

  /// The a_i proper, without the adjoined unit.
  std::vector<ComplexMatrix> source_generators() const {
    if (!unital) return generators;
    return {generators.begin(), generators.end() - 1};
  }

  std::size_t source_count() const { return generators.size() - (unital ? 1 : 0); }
};

inline GeneratorSet unitize(GeneratorSet g) {
  g.validate();
  if (g.unital) return g;
  g.generators.push_back(ComplexMatrix::identity(g.dim));
  g.unital = true;
  return g;
}

/// Rescales every generator to operator norm one and drops zero generators.
inline GeneratorSet normalize(GeneratorSet g) {
  g.validate();
  std::vector<ComplexMatrix> kept;
  kept.reserve(g.generators.size());
  for (auto& a : g.generators) {
    const double n = operator_norm(a);
    if (n == 0.0) continue;
    kept.push_back(std::move(a) * Complex(1.0 / n));
  }
  g.generators = std::move(kept);
  g.normalized = true;
  return g;
}

/// Trace-orthonormal basis of the *-algebra spanned by a set of matrices.
struct StarClosure {
  std::size_t dim_ambient = 0;
  std::vector<ComplexMatrix> basis;
  bool saturated = false;

  std::size_t dimension() const { return basis.size(); }
};

struct ClosureOptions {
  std::size_t dim_cap = 0;  // 0 means dim_ambient², the full matrix algebra
  double rank_tol = 1e-9;
  bool throw_on_cap = true;
};

namespace detail {

class ClosureBuilder {
 public:
  ClosureBuilder(std::size_t dim, const ClosureOptions& options)
      : full_(dim * dim),
        cap_(options.dim_cap == 0 ? dim * dim : options.dim_cap),
        rank_tol_(options.rank_tol),
        throw_on_cap_(options.throw_on_cap) {}

  std::size_t size() const { return basis_.size(); }
  bool full() const { return basis_.size() >= full_; }
  bool capped() const { return capped_; }
  const ComplexMatrix& at(std::size_t i) const { return basis_[i]; }

  // Adds the part of `candidate` orthogonal to the current span, together
  // with its adjoint. Candidates are expected at unit scale (Frobenius
  // norm ≤ 1), which makes rank_tol a relative threshold.
  void add_with_adjoint(const ComplexMatrix& candidate) {
    if (try_add(candidate)) try_add(basis_.back().adjoint());
  }

  std::vector<ComplexMatrix> take() { return std::move(basis_); }

 private:
  bool try_add(const ComplexMatrix& candidate) {
    if (full() || capped_) return false;
    ComplexMatrix v = candidate;
    // Modified Gram-Schmidt, two passes.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis_) {
        const Complex coef = trace_inner(b, v);
        if (coef == Complex{}) continue;
        auto ev = v.entries();
        auto eb = b.entries();
        for (std::size_t i = 0; i < ev.size(); ++i) ev[i] -= coef * eb[i];
      }
    }
    const double r = v.frobenius_norm();
    if (r <= rank_tol_) return false;
    if (basis_.size() >= cap_) {
      if (throw_on_cap_) {
        throw closure_cap_error("star_closure: dimension cap " + std::to_string(cap_) +
                                " exceeded");
      }
      capped_ = true;
      return false;
    }
    basis_.push_back(std::move(v) * Complex(1.0 / r));
    return true;
  }

  std::size_t full_;
  std::size_t cap_;
  double rank_tol_;
  bool throw_on_cap_;
  bool capped_ = false;
  std::vector<ComplexMatrix> basis_;
};

}  // namespace detail

/// Smallest adjoint-closed, product-closed subspace containing `mats`.
///
/// Each round multiplies every pair of basis elements in which at least one
/// factor is new since the previous round; the loop stops at a fixpoint or
/// once the full algebra M_d is reached.
inline StarClosure star_closure(const std::vector<ComplexMatrix>& mats,
                                const ClosureOptions& options = {}) {
  if (mats.empty()) return {};
  const std::size_t d = mats.front().rows();
  for (const auto& m : mats) {
    if (!m.is_square() || m.rows() != d) {
      throw precondition_error("star_closure: matrices must share one square size");
    }
  }
  if (options.dim_cap == 0 && d == 0) return {};

  detail::ClosureBuilder builder(d, options);
  for (const auto& m : mats) {
    const double n = m.frobenius_norm();
    if (n == 0.0) continue;
    builder.add_with_adjoint(m * Complex(1.0 / n));
  }

  std::size_t seen = 0;
  while (seen < builder.size() && !builder.full() && !builder.capped()) {
    const std::size_t hi = builder.size();
    for (std::size_t i = 0; i < hi && !builder.full(); ++i) {
      for (std::size_t j = (i < seen ? seen : 0); j < hi && !builder.full(); ++j) {
        builder.add_with_adjoint(builder.at(i) * builder.at(j));
      }
    }
    seen = hi;
  }

  StarClosure out;
  out.dim_ambient = d;
  out.saturated = !builder.capped();
  out.basis = builder.take();
  return out;
}

struct Membership {
  bool member = false;
  double residual = 0.0;  // ‖M − Proj(M)‖_F
};

/// Tests M ∈ span(C) with ‖M − Proj(M)‖_F ≤ tol·max(1, ‖M‖_F).
inline Membership contains(const StarClosure& c, const ComplexMatrix& m, double tol = 1e-8) {
  if (m.rows() != c.dim_ambient || m.cols() != c.dim_ambient) {
    throw precondition_error("contains: dimension mismatch");
  }
  ComplexMatrix r = m;
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : c.basis) {
      const Complex coef = trace_inner(b, r);
      auto er = r.entries();
      auto eb = b.entries();
      for (std::size_t i = 0; i < er.size(); ++i) er[i] -= coef * eb[i];
    }
  }
  Membership out;
  out.residual = r.frobenius_norm();
  out.member = out.residual <= tol * std::max(1.0, m.frobenius_norm());
  return out;
}

}  // namespace projgen
