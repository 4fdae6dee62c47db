#pragma once

#include <string>

#include "blochlab/certificates.hpp"
#include "blochlab/critical.hpp"
#include "blochlab/fermi.hpp"
#include "blochlab/io.hpp"
#include "blochlab/polytope.hpp"
#include "blochlab/spectrum.hpp"

namespace blochlab {

// JSON documents for the CLI emissions. Each takes the run metadata block
// (tool, version, config, seed) and embeds it under "meta".

json report_json(const SpectralReport& report, const json& meta);
json fermi_json(const FermiSection& section, const json& meta);
json certificate_json(const FactorizationCertificate& cert, const json& meta);
json composite_json(const CompositeResult& result, const json& meta);
json critical_json(const CriticalSearch& search, const std::vector<EdgeAudit>& audit, const json& meta);
json polytope_json(const NewtonPolytope& polytope, const LaurentPoly& d, const json& meta);
json mode_json(const ModeResult& mode, const RealSpaceWindow* sample, const json& meta);
json resolvent_json(const ResolventResult& result, const json& meta);

// {"box": [[lo, hi], ...], "cell_size": n, "values": [[re, im], ...]}
json window_to_json(const RealSpaceWindow& w);
RealSpaceWindow window_from_json(const json& j);

// First line "# " + compact meta JSON, then a header row and data rows.
// bands.csv: k1..kd, lambda1..lambdaN per grid point (row-major, last axis fastest).
std::string bands_csv(const BandGrid& grid, const json& meta);
// dos.csv: bin_center, density.
std::string dos_csv(const DensityOfStates& dos, const json& meta);

}  // namespace blochlab
