#pragma once

// CSV writers. Numbers are printed with 17 significant digits so a replayed
// run reproduces its files byte for byte.

#include <ostream>
#include <string>

#include "steuler/geometry.hpp"
#include "steuler/integrate.hpp"

namespace steuler {

inline constexpr const char* kEnsembleCsvHeader =
    "t,mean_L2,se_L2,mean_H1,se_H1,envelope_H1,mean_M,se_M,qv_gap,se_qv";

/// One row per saved time; the M and QV columns refer to probe `probe`
/// (empty when the ensemble ran without probes).
void write_ensemble_csv(std::ostream& os, const EnsembleDiagnostics& ens, std::size_t probe = 0);

/// Per saved time for one probe: M, the QV gap and L_t - L_0.
void write_probe_csv(std::ostream& os, const EnsembleDiagnostics& ens, std::size_t probe);

/// Per path: drift extremes, iteration counts and final norms.
void write_paths_csv(std::ostream& os, const EnsembleDiagnostics& ens);

/// Norms after every step of one path.
void write_path_norms_csv(std::ostream& os, const PathResult& path, double dt);

/// Saved states, one row per saved time, one column per coefficient.
void write_states_csv(std::ostream& os, const PathResult& path);

/// index,kind,k1,k2,norm for the coefficient enumeration of `trunc`.
void write_modes_csv(std::ostream& os, const TruncationSet& trunc);

/// Sparse k,l,m,value dumps over coefficient indices (see modes.csv).
void write_structure_csv(std::ostream& os, const StructureTables& tables);
void write_christoffel_csv(std::ostream& os, const StructureTables& tables);

/// Shortest round-trip text for a double.
std::string format_number(double v);

}  // namespace steuler
