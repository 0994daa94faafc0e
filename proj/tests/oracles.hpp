#pragma once

// Independent reference implementations used only by the tests. None of
// these call into the decoder or the butterfly transform.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "phmm/codec.hpp"
#include "phmm/decoder.hpp"
#include "phmm/field.hpp"
#include "phmm/hmm.hpp"

namespace phmm::oracle {

using Dense = std::vector<std::vector<Symbol>>;

// A^{(x)t} built by repeated tensor products: (A (x) B)[(a,b),(c,d)] = A[a][c] B[b][d].
inline Dense kronecker_power(const PrimeField& f, const Dense& a, std::size_t t) {
  Dense acc{{1}};
  for (std::size_t level = 0; level < t; ++level) {
    const std::size_t n = acc.size(), k = a.size();
    Dense next(n * k, std::vector<Symbol>(n * k, 0));
    for (std::size_t r1 = 0; r1 < n; ++r1)
      for (std::size_t c1 = 0; c1 < n; ++c1)
        for (std::size_t r2 = 0; r2 < k; ++r2)
          for (std::size_t c2 = 0; c2 < k; ++c2)
            next[r1 * k + r2][c1 * k + c2] = f.mul(acc[r1][c1], a[r2][c2]);
    acc = std::move(next);
  }
  return acc;
}

inline Dense kernel_dense(const KernelMatrix& m, bool inverse) {
  Dense out(m.size(), std::vector<Symbol>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) out[i][j] = inverse ? m.inverse_at(i, j) : m.at(i, j);
  return out;
}

inline std::vector<Symbol> dense_apply(const PrimeField& f, const Dense& a, const std::vector<Symbol>& v) {
  std::vector<Symbol> out(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] = f.add(out[i], f.mul(a[i][j], v[j]));
  return out;
}

// Every z in F_q^m with its product-prior weight and its image U = M^{(x)t} z.
struct Enumeration {
  std::vector<std::vector<Symbol>> u;
  std::vector<double> weight;
};

inline Enumeration enumerate(const KernelMatrix& kernel, std::size_t t, const std::vector<std::vector<double>>& prior) {
  const PrimeField& f = kernel.field();
  const unsigned q = f.modulus();
  const std::size_t m = prior.size();
  const Dense big = kronecker_power(f, kernel_dense(kernel, false), t);
  std::size_t total = 1;
  for (std::size_t i = 0; i < m; ++i) total *= q;
  Enumeration e;
  std::vector<Symbol> z(m);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    double w = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      z[i] = static_cast<Symbol>(rest % q);
      rest /= q;
      w *= prior[i][z[i]];
    }
    e.u.push_back(dense_apply(f, big, z));
    e.weight.push_back(w);
  }
  return e;
}

// P(U_p = . | U_<p = prefix) by summing the prior over all completions.
inline std::vector<double> conditional(const Enumeration& e, unsigned q, std::size_t p, const std::vector<Symbol>& prefix) {
  std::vector<double> acc(q, 0.0);
  for (std::size_t s = 0; s < e.u.size(); ++s) {
    bool match = true;
    for (std::size_t r = 0; r < p && match; ++r) match = e.u[s][r] == prefix[r];
    if (match) acc[e.u[s][p]] += e.weight[s];
  }
  double sum = 0.0;
  for (double a : acc) sum += a;
  for (double& a : acc) a = sum > 0.0 ? a / sum : 1.0 / q;
  return acc;
}

struct OracleDecode {
  std::vector<Symbol> u_hat;
  std::vector<std::vector<double>> conditionals;
};

// Sequential decoder: specified coordinates are taken as given, free ones
// take the smallest argmax of the exhaustive conditional.
inline OracleDecode brute_force_decode(const KernelMatrix& kernel, std::size_t t,
                                       const std::vector<std::vector<double>>& prior, const std::vector<Symbol>& u) {
  const unsigned q = kernel.field().modulus();
  const Enumeration e = enumerate(kernel, t, prior);
  OracleDecode out;
  out.u_hat.assign(u.size(), 0);
  for (std::size_t p = 0; p < u.size(); ++p) {
    auto cond = conditional(e, q, p, out.u_hat);
    std::size_t best = 0;
    for (std::size_t v = 1; v < q; ++v)
      if (cond[v] > cond[best]) best = v;
    out.u_hat[p] = u[p] != kUnspecified ? u[p] : static_cast<Symbol>(best);
    out.conditionals.push_back(std::move(cond));
  }
  return out;
}

// Exact P(Y_n = . | Y_<n = y) by summing over all state paths of length n.
inline std::vector<double> path_enumeration(const MarkovSource& src, const std::vector<Symbol>& y) {
  const std::size_t l = src.states();
  const std::size_t n = y.size() + 1;
  const unsigned q = src.alphabet();
  std::size_t paths = 1;
  for (std::size_t i = 0; i < n; ++i) paths *= l;
  std::vector<double> acc(q, 0.0);
  std::vector<std::size_t> x(n);
  for (std::size_t idx = 0; idx < paths; ++idx) {
    std::size_t rest = idx;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rest % l;
      rest /= l;
    }
    double w = src.stationary()[x[0]];
    for (std::size_t i = 1; i < n; ++i) w *= src.transition(x[i], x[i - 1]);
    for (std::size_t i = 0; i + 1 < n; ++i) w *= src.emission(x[i], y[i]);
    for (unsigned v = 0; v < q; ++v) acc[v] += w * src.emission(x[n - 1], static_cast<Symbol>(v));
  }
  double sum = 0.0;
  for (double a : acc) sum += a;
  for (double& a : acc) a /= sum;
  return acc;
}

// Random source with strictly positive entries; pi by long power iteration.
inline MarkovSource random_source(std::mt19937_64& rng, unsigned q, std::size_t l) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> trans(l * l), outs(l * q);
  for (std::size_t j = 0; j < l; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < l; ++i) s += trans[i * l + j] = u(rng);
    for (std::size_t i = 0; i < l; ++i) trans[i * l + j] /= s;
  }
  for (std::size_t i = 0; i < l; ++i) {
    double s = 0.0;
    for (unsigned y = 0; y < q; ++y) s += outs[i * q + y] = u(rng);
    for (unsigned y = 0; y < q; ++y) outs[i * q + y] /= s;
  }
  std::vector<double> pi(l, 1.0 / l), next(l);
  for (int it = 0; it < 5000; ++it) {
    double s = 0.0;
    for (std::size_t i = 0; i < l; ++i) {
      next[i] = 0.0;
      for (std::size_t j = 0; j < l; ++j) next[i] += trans[i * l + j] * pi[j];
      s += next[i];
    }
    for (std::size_t i = 0; i < l; ++i) pi[i] = next[i] / s;
  }
  return MarkovSource(q, pi, trans, outs);
}

// Sticky source: stay with probability `stay`, emit state mod q with probability `emit`.
inline MarkovSource sticky_source(unsigned q, std::size_t l, double stay, double emit) {
  std::vector<double> trans(l * l), outs(l * q);
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < l; ++j) trans[i * l + j] = l == 1 ? 1.0 : (i == j ? stay : (1.0 - stay) / (l - 1));
  for (std::size_t s = 0; s < l; ++s)
    for (unsigned y = 0; y < q; ++y) outs[s * q + y] = y == s % q ? emit : (1.0 - emit) / (q - 1);
  return MarkovSource(q, std::vector<double>(l, 1.0 / l), trans, outs);
}

inline std::vector<std::vector<double>> random_priors(std::mt19937_64& rng, unsigned q, std::size_t m) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<std::vector<double>> out(m, std::vector<double>(q));
  for (auto& d : out) {
    double s = 0.0;
    for (auto& x : d) s += x = std::pow(u(rng), 3.0);  // skewed toward confident priors
    for (auto& x : d) x /= s;
  }
  return out;
}

inline PriorProfile to_profile(const std::vector<std::vector<double>>& priors) {
  std::vector<SymbolDistribution> d;
  for (const auto& p : priors) d.push_back(SymbolDistribution{p});
  return PriorProfile(d);
}

}  // namespace phmm::oracle
