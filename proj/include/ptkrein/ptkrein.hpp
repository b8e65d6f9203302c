#pragma once

// Umbrella header: PT-symmetry and pseudo-Hermiticity checks, the
// constructive Jordan-form metric, Krein-signature classification, and the
// Kelvin-Helmholtz example family.

#include "ptkrein/jordan.hpp"
#include "ptkrein/kh.hpp"
#include "ptkrein/krein.hpp"
#include "ptkrein/linalg.hpp"
#include "ptkrein/matrix_io.hpp"
#include "ptkrein/metric.hpp"
#include "ptkrein/types.hpp"
