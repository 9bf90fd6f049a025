#pragma once

#include "ioncrystal/kernels/coulomb.hpp"

namespace ioncrystal::kernels::detail {

// Defined only in translation units built for the matching target.
const CoulombKernels* avx2_table();
const CoulombKernels* neon_table();

}  // namespace ioncrystal::kernels::detail
