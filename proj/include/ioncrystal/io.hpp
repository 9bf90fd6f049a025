#pragma once

// CSV / JSON serialization. CSV numbers use 17 significant digits,
// ',' separators and LF line endings.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "ioncrystal/band_scan.hpp"
#include "ioncrystal/crystal.hpp"
#include "ioncrystal/modes.hpp"
#include "ioncrystal/spin_coupling.hpp"
#include "ioncrystal/trap_model.hpp"

namespace ioncrystal {

std::string format_number(double v);

nlohmann::json to_json(const DimensionlessTrap& trap);
nlohmann::json to_json(const CrystalState& state, const ShellDecomposition& shells);
nlohmann::json to_json(const ModeSpectrum& spectrum);
nlohmann::json to_json(const PowerLawFit& fit);

/// index,x1,x2,radius,ring
void write_positions_csv(std::ostream& os, const CrystalState& state,
                         const ShellDecomposition& shells);

/// V_r,V_tb,beta1_sq,beta3_sq,stable
void write_stability_csv(std::ostream& os, const StabilityMap& map);

/// V_r,mode_kind,mode_index,frequency (axial then planar per point).
void write_spectrum_csv(std::ostream& os, double ring_dc, const ModeSpectrum& spectrum);
void write_band_csv(std::ostream& os, const BandScan& scan);

/// mu,m,n,r_mn,J_mn for every successful detuning.
void write_pairs_csv(std::ostream& os, const std::vector<DetuningEntry>& entries);

/// One object per detuning: mu, exponent_b, r_squared, n_pairs_used (or error).
nlohmann::json fit_summary(const std::vector<DetuningEntry>& entries);

}  // namespace ioncrystal
