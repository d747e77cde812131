#pragma once

// Periodic grid, Fourier-coefficient fields and the spectral operations on
// them. Everything here is header-only and templated on the scalar type.

#include "gevrey_mkdv/errors.hpp"
#include "gevrey_mkdv/grid.hpp"
#include "gevrey_mkdv/spectral_field.hpp"
#include "gevrey_mkdv/spectral_ops.hpp"
