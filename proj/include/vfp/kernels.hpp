#pragma once

#include <cstddef>

// Hot loops of the kinetic step. Every kernel works on contiguous x-rows of a
// velocity-major grid function. The scalar table is the reference; SIMD tables
// must reproduce it bit for bit (no FMA contraction, same operation order).
namespace vfp::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  const char* name;

  // Batched Thomas sweep for nrows tridiagonal systems sharing one factorization.
  // data holds nrows rows of `width` right-hand sides (row r at data + r*width),
  // overwritten by the solution. a = sub-diagonal, den = pivots, cp = c'/den.
  void (*thomas_batched)(const double* a, const double* den, const double* cp,
                         std::size_t nrows, double* data, std::size_t width);

  // Limited face reconstruction: out[k] = c[k] + sign * vl(c[k]-c[k-1], c[k+1]-c[k])
  // for k in [0, n), where vl(p, q) = p*q/(p+q) if p*q > 0 else 0 (van Leer, halved).
  // c[-1] and c[n] must be readable.
  void (*limited_faces)(const double* c, std::size_t n, double sign, double* out);

  // Conservative update: out[i] = cells[i] - nu * (faces[i+1] - faces[i]).
  void (*flux_update)(const double* cells, const double* faces, std::size_t n, double nu,
                      double* out);

  // out[i] += coef[i] * (a * up[i] - b * dn[i]).
  void (*field_update)(const double* up, double a, const double* dn, double b,
                       const double* coef, std::size_t n, double* out);

  // y[i] += w * x[i].
  void (*axpy)(double w, const double* x, std::size_t n, double* y);
};

const KernelTable& scalar_table();

// nullptr when the variant was not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_table();

// Best available table. VFP_KERNELS=scalar in the environment forces the reference.
const KernelTable& active();

}  // namespace vfp::kernels
