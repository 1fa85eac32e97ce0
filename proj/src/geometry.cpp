#include "steuler/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "steuler/dynamics.hpp"

namespace steuler {

namespace {

constexpr double kDrop = 1e-14;

struct Triple {
  std::uint64_t key;  // (k * dim + l) * dim + m
  double value;
};

// Sorts and merges triples into a CSR layout over (k, l).
void compress(std::vector<Triple>& triples, std::size_t dim, std::vector<std::size_t>& offsets,
              std::vector<StructureTables::Entry>& entries) {
  std::sort(triples.begin(), triples.end(),
            [](const Triple& a, const Triple& b) { return a.key < b.key; });
  offsets.assign(dim * dim + 1, 0);
  entries.clear();
  std::size_t row = 0;
  for (std::size_t i = 0; i < triples.size();) {
    const std::uint64_t key = triples[i].key;
    double sum = 0.0;
    for (; i < triples.size() && triples[i].key == key; ++i) sum += triples[i].value;
    if (std::abs(sum) <= kDrop) continue;
    const std::size_t r = key / dim;
    for (; row < r; ++row) offsets[row + 1] = entries.size();
    entries.push_back({static_cast<std::uint32_t>(key % dim), sum});
  }
  for (; row < dim * dim; ++row) offsets[row + 1] = entries.size();
}

double lookup(std::span<const StructureTables::Entry> row, std::size_t m) {
  for (const auto& e : row)
    if (e.m == m) return e.value;
  return 0.0;
}

// Does [a, b] reach a wavevector outside the truncation?
bool bracket_leaves(const BasisMode& a, const BasisMode& b, const TruncationSet& trunc) {
  const double drop = 1e-13 * 4.0 * std::numbers::pi * std::numbers::pi;
  for (int s : {1, -1}) {
    for (int t : {1, -1}) {
      const ModeIndex q{s * a.k.k1 + t * b.k.k1, s * a.k.k2 + t * b.k.k2};
      if (trunc.contains(q)) continue;
      for (ModeKind kind : {ModeKind::C, ModeKind::S}) {
        const BasisMode target{kind, q};
        const double v = advection_integral(a, b, target) - advection_integral(b, a, target);
        if (std::abs(v) > drop) return true;
      }
    }
  }
  return false;
}

}  // namespace

SpectralField lie_bracket(const SpectralField& x, const SpectralField& y, TruncationSet out) {
  SpectralField r = advect(x, y, out);
  r -= advect(y, x, out);
  return r;
}

SpectralField lie_bracket(const SpectralField& x, const SpectralField& y) {
  return lie_bracket(x, y, TruncationSet(std::max(x.n(), y.n())));
}

double orthonormal_scale(const TruncationSet& trunc, std::size_t i) {
  return std::sqrt(mode_norm2(trunc.mode(i).k));
}

StructureTables::StructureTables(TruncationSet trunc)
    : trunc_(trunc), dim_(trunc.dimension()), incomplete_(dim_ * dim_, 0) {}

std::span<const StructureTables::Entry> StructureTables::c_row(std::size_t k, std::size_t l) const {
  const std::size_t r = k * dim_ + l;
  return {c_entries_.data() + c_offsets_[r], c_offsets_[r + 1] - c_offsets_[r]};
}

std::span<const StructureTables::Entry> StructureTables::gamma_row(std::size_t k,
                                                                  std::size_t l) const {
  const std::size_t r = k * dim_ + l;
  return {gamma_entries_.data() + gamma_offsets_[r], gamma_offsets_[r + 1] - gamma_offsets_[r]};
}

double StructureTables::c(std::size_t k, std::size_t l, std::size_t m) const {
  return lookup(c_row(k, l), m);
}

double StructureTables::gamma(std::size_t k, std::size_t l, std::size_t m) const {
  return lookup(gamma_row(k, l), m);
}

std::size_t StructureTables::incomplete_count() const {
  return static_cast<std::size_t>(std::count(incomplete_.begin(), incomplete_.end(), 1));
}

StructureTables build_structure_tables(TruncationSet trunc) {
  StructureTables t(trunc);
  const std::size_t dim = t.dim_;
  const AdvectionTensor tensor(trunc);
  std::vector<double> scale(dim);
  for (std::size_t i = 0; i < dim; ++i) scale[i] = orthonormal_scale(trunc, i);

  // c for k < l from the advection tensor, mirrored with a sign flip.
  std::vector<Triple> c;
  std::vector<double> row(dim, 0.0);
  std::vector<std::uint32_t> touched;
  for (std::size_t k = 0; k < dim; ++k) {
    for (std::size_t l = k + 1; l < dim; ++l) {
      touched.clear();
      for (const auto& e : tensor.row(k, l)) {
        if (row[e.j] == 0.0) touched.push_back(e.j);
        row[e.j] += e.value;
      }
      for (const auto& e : tensor.row(l, k)) {
        if (row[e.j] == 0.0) touched.push_back(e.j);
        row[e.j] -= e.value;
      }
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
      for (std::uint32_t m : touched) {
        const double v = row[m] / (scale[k] * scale[l] * scale[m]);
        row[m] = 0.0;
        if (std::abs(v) <= kDrop) continue;
        c.push_back({(k * dim + l) * dim + m, v});
        c.push_back({(l * dim + k) * dim + m, -v});
      }
      if (bracket_leaves(trunc.mode(k), trunc.mode(l), trunc)) {
        t.incomplete_[k * dim + l] = 1;
        t.incomplete_[l * dim + k] = 1;
      }
    }
  }

  // Each c_{x,y}^z enters Gamma_{x,y}^z, Gamma_{z,x}^y and Gamma_{y,z}^x.
  std::vector<Triple> gamma;
  gamma.reserve(3 * c.size());
  for (const Triple& e : c) {
    const std::uint64_t x = e.key / (dim * dim);
    const std::uint64_t y = (e.key / dim) % dim;
    const std::uint64_t z = e.key % dim;
    const double h = 0.5 * e.value;
    gamma.push_back({(x * dim + y) * dim + z, h});
    gamma.push_back({(z * dim + x) * dim + y, -h});
    gamma.push_back({(y * dim + z) * dim + x, h});
  }
  compress(c, dim, t.c_offsets_, t.c_entries_);
  compress(gamma, dim, t.gamma_offsets_, t.gamma_entries_);
  return t;
}

double jacobi_residual(const StructureTables& tables, std::size_t a, std::size_t b,
                       std::size_t c) {
  std::vector<double> sum(tables.dimension(), 0.0);
  const std::size_t cyc[3][3] = {{a, b, c}, {b, c, a}, {c, a, b}};
  for (const auto& [x, y, z] : cyc) {
    for (const auto& inner : tables.c_row(x, y))
      for (const auto& outer : tables.c_row(inner.m, z)) sum[outer.m] += inner.value * outer.value;
  }
  double worst = 0.0;
  for (double v : sum) worst = std::max(worst, std::abs(v));
  return worst;
}

SpectralField geodesic_drift(const SpectralField& u, const StructureTables& tables) {
  if (!(u.trunc() == tables.trunc())) {
    throw DimensionMismatch("geodesic_drift: tables built for n=" +
                            std::to_string(tables.trunc().n()) + ", field has n=" +
                            std::to_string(u.n()));
  }
  const std::size_t dim = tables.dimension();
  std::vector<std::size_t> support;
  std::vector<double> x(dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    if (u[i] == 0.0) continue;
    support.push_back(i);
    x[i] = u[i] * orthonormal_scale(u.trunc(), i);
  }
  for (std::size_t l : support) {
    for (std::size_t j : support) {
      if (tables.incomplete(l, j)) {
        throw PreconditionError("geodesic_drift: interaction of " + to_string(u.trunc().mode(l)) +
                                " and " + to_string(u.trunc().mode(j)) +
                                " is not resolved at n=" + std::to_string(u.n()));
      }
    }
  }
  std::vector<double> r(dim, 0.0);
  for (std::size_t l : support)
    for (std::size_t j : support)
      for (const auto& e : tables.gamma_row(l, j)) r[e.m] -= e.value * x[l] * x[j];
  SpectralField out(u.trunc());
  for (std::size_t m = 0; m < dim; ++m) out[m] = r[m] / orthonormal_scale(u.trunc(), m);
  return out;
}

SpectralField geodesic_noise(const SpectralField& u, std::size_t l, const StructureTables& tables) {
  if (!(u.trunc() == tables.trunc())) {
    throw DimensionMismatch("geodesic_noise: tables built for n=" +
                            std::to_string(tables.trunc().n()) + ", field has n=" +
                            std::to_string(u.n()));
  }
  if (l > 1) throw PreconditionError("geodesic_noise: l must be a constant direction (0 or 1)");
  const std::size_t dim = tables.dimension();
  const double sl = orthonormal_scale(u.trunc(), l);
  std::vector<double> r(dim, 0.0);
  for (std::size_t j = 0; j < dim; ++j) {
    if (u[j] == 0.0) continue;
    const double xj = u[j] * orthonormal_scale(u.trunc(), j);
    for (const auto& e : tables.gamma_row(l, j)) r[e.m] -= sl * e.value * xj;
  }
  SpectralField out(u.trunc());
  for (std::size_t m = 0; m < dim; ++m) out[m] = r[m] / orthonormal_scale(u.trunc(), m);
  return out;
}

}  // namespace steuler
