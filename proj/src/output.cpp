#include "steuler/output.hpp"

#include <cmath>
#include <cstdio>

namespace steuler {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string mode_label(const BasisMode& m) {
  return std::string(m.kind == ModeKind::C ? "C" : "S") + "(" + std::to_string(m.k.k1) + ";" +
         std::to_string(m.k.k2) + ")";
}

void row(std::ostream& os, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) os << ',';
    os << format_number(v);
    first = false;
  }
  os << '\n';
}

}  // namespace

void write_ensemble_csv(std::ostream& os, const EnsembleDiagnostics& ens, std::size_t probe) {
  os << kEnsembleCsvHeader << '\n';
  const bool has_probe = probe < ens.m.size();
  for (std::size_t t = 0; t < ens.times.size(); ++t) {
    const Moments none;
    const Moments& m = has_probe ? ens.m[probe][t] : none;
    const Moments& g = has_probe ? ens.m_sq_minus_qv[probe][t] : none;
    row(os, {ens.times[t], ens.l2[t].mean, ens.l2[t].se(), ens.h1[t].mean, ens.h1[t].se(),
             ens.envelope_h1[t], m.mean, m.se(), g.mean, g.se()});
  }
}

void write_probe_csv(std::ostream& os, const EnsembleDiagnostics& ens, std::size_t probe) {
  os << "t,mean_M,se_M,qv_gap,se_qv,mean_L_re,se_L_re,mean_L_im,se_L_im\n";
  for (std::size_t t = 0; t < ens.times.size(); ++t) {
    const auto& m = ens.m[probe][t];
    const auto& g = ens.m_sq_minus_qv[probe][t];
    const auto& lr = ens.l_re[probe][t];
    const auto& li = ens.l_im[probe][t];
    row(os, {ens.times[t], m.mean, m.se(), g.mean, g.se(), lr.mean, lr.se(), li.mean, li.se()});
  }
}

void write_paths_csv(std::ostream& os, const EnsembleDiagnostics& ens) {
  os << "path,max_rel_L2_drift,max_rel_H1_drift,max_iterations,final_L2,final_H1\n";
  for (std::size_t p = 0; p < ens.paths.size(); ++p) {
    const auto& s = ens.paths[p];
    os << p << ',' << format_number(s.max_rel_l2_drift) << ','
       << format_number(s.max_rel_h1_drift) << ',' << s.max_iterations << ','
       << format_number(s.l2.empty() ? 0.0 : s.l2.back()) << ','
       << format_number(s.h1.empty() ? 0.0 : s.h1.back()) << '\n';
  }
}

void write_path_norms_csv(std::ostream& os, const PathResult& path, double dt) {
  os << "step,t,L2,H1\n";
  for (std::size_t s = 0; s < path.l2.size(); ++s) {
    os << s << ',';
    row(os, {static_cast<double>(s) * dt, path.l2[s], path.h1[s]});
  }
}

void write_states_csv(std::ostream& os, const PathResult& path) {
  if (path.states.empty()) return;
  const TruncationSet& t = path.states.front().trunc();
  os << 't';
  for (std::size_t i = 0; i < t.dimension(); ++i) os << ',' << mode_label(t.mode(i));
  os << '\n';
  for (std::size_t s = 0; s < path.states.size(); ++s) {
    os << format_number(path.times[s]);
    for (double v : path.states[s].coeffs()) os << ',' << format_number(v);
    os << '\n';
  }
}

void write_modes_csv(std::ostream& os, const TruncationSet& trunc) {
  os << "index,kind,k1,k2,norm\n";
  for (std::size_t i = 0; i < trunc.dimension(); ++i) {
    const BasisMode m = trunc.mode(i);
    os << i << ',' << (m.kind == ModeKind::C ? 'C' : 'S') << ',' << m.k.k1 << ',' << m.k.k2
       << ',' << format_number(std::sqrt(mode_norm2(m.k))) << '\n';
  }
}

void write_structure_csv(std::ostream& os, const StructureTables& tables) {
  os << "k,l,m,value\n";
  const std::size_t dim = tables.dimension();
  for (std::size_t k = 0; k < dim; ++k)
    for (std::size_t l = 0; l < dim; ++l)
      for (const auto& e : tables.c_row(k, l))
        os << k << ',' << l << ',' << e.m << ',' << format_number(e.value) << '\n';
}

void write_christoffel_csv(std::ostream& os, const StructureTables& tables) {
  os << "k,l,m,value\n";
  const std::size_t dim = tables.dimension();
  for (std::size_t k = 0; k < dim; ++k)
    for (std::size_t l = 0; l < dim; ++l)
      for (const auto& e : tables.gamma_row(k, l))
        os << k << ',' << l << ',' << e.m << ',' << format_number(e.value) << '\n';
}

}  // namespace steuler
