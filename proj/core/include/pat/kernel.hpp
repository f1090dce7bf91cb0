#pragma once

// Time-domain attenuation kernel m_alpha coupling un-attenuated to
// attenuated pressure traces, p_alpha(t) = int_0^t m_alpha(t, r) p_0(r) dr,
// and its discrete application to sinograms.
//
// Time is handled in the rescaled variable c0 * t: column l' of the kernel
// is the inverse DFT of
//     k / (k + i alpha(c0 k)) * exp(i (k + i alpha(c0 k)) r_l'),   r_l' = c0 t_l',
// over wavenumbers k on a zero-padded grid of length 2 (N_t + 1). With
// alpha = 0 this is exactly the discrete identity.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pat/array2d.hpp"
#include "pat/attenuation.hpp"
#include "pat/geometry.hpp"

namespace pat {

struct KernelMatrix {
  TemporalGrid grid;
  /// m[l, l'] in 1/s; apply_M multiplies by dt.
  Array2D m;
  std::string law_tag;
  /// True once entries with l' > l are zero.
  bool causal = false;
};

/// Throws NumericalError (naming the frequency) when the spectrum overflows,
/// e.g. a law with Re alpha < 0 growing too fast.
KernelMatrix build_kernel_matrix(const AttenuationLaw& law, const TemporalGrid& grid,
                                 double sound_speed);

/// Zeroes entries with l' > l. Idempotent.
KernelMatrix causal_truncate(KernelMatrix kernel);

/// out[k, l] = dt * sum_{l' <= l} m[l, l'] g[k, l'].
Sinogram apply_M(const KernelMatrix& kernel, const Sinogram& g);
/// out[k, l'] = dt * sum_{l >= l'} m[l, l'] g[k, l]; exact transpose of apply_M.
Sinogram apply_M_adjoint(const KernelMatrix& kernel, const Sinogram& g);

/// Samples of K_alpha(x, t - |x|/c0) / (4 pi |x|) at t_l, the Green's
/// function of the attenuated wave equation at distance |x|.
std::vector<double> greens_profile(const AttenuationLaw& law, double distance,
                                   const TemporalGrid& grid, double sound_speed);

/// Width in samples of the contiguous run around the column maximum where
/// entries exceed `fraction` of that maximum; the two threshold crossings
/// are located by linear interpolation.
double support_width(std::span<const double> column, double fraction = 0.01);

/// Column l' of the kernel as a contiguous vector.
std::vector<double> kernel_column(const KernelMatrix& kernel, std::size_t column);

}  // namespace pat
