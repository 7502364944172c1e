#include <immintrin.h>

#include "vfp/kernels.hpp"

namespace vfp::kernels {

namespace {

constexpr std::size_t kLanes = 4;

void thomas_batched(const double* a, const double* den, const double* cp, std::size_t nrows,
                    double* data, std::size_t width) {
  if (nrows == 0) return;
  const std::size_t vec_end = width - width % kLanes;
  {
    const __m256d d0 = _mm256_set1_pd(den[0]);
    std::size_t i = 0;
    for (; i < vec_end; i += kLanes)
      _mm256_storeu_pd(data + i, _mm256_div_pd(_mm256_loadu_pd(data + i), d0));
    for (; i < width; ++i) data[i] = data[i] / den[0];
  }
  for (std::size_t j = 1; j < nrows; ++j) {
    double* r = data + j * width;
    const double* prev = r - width;
    const __m256d aj = _mm256_set1_pd(a[j]);
    const __m256d dj = _mm256_set1_pd(den[j]);
    std::size_t i = 0;
    for (; i < vec_end; i += kLanes) {
      const __m256d t = _mm256_sub_pd(_mm256_loadu_pd(r + i),
                                      _mm256_mul_pd(aj, _mm256_loadu_pd(prev + i)));
      _mm256_storeu_pd(r + i, _mm256_div_pd(t, dj));
    }
    for (; i < width; ++i) r[i] = (r[i] - a[j] * prev[i]) / den[j];
  }
  for (std::size_t j = nrows - 1; j-- > 0;) {
    double* r = data + j * width;
    const double* next = r + width;
    const __m256d cj = _mm256_set1_pd(cp[j]);
    std::size_t i = 0;
    for (; i < vec_end; i += kLanes) {
      const __m256d t = _mm256_sub_pd(_mm256_loadu_pd(r + i),
                                      _mm256_mul_pd(cj, _mm256_loadu_pd(next + i)));
      _mm256_storeu_pd(r + i, t);
    }
    for (; i < width; ++i) r[i] = r[i] - cp[j] * next[i];
  }
}

void limited_faces(const double* c, std::size_t n, double sign, double* out) {
  const __m256d vs = _mm256_set1_pd(sign);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    const __m256d cm = _mm256_loadu_pd(c + k - 1);
    const __m256d c0 = _mm256_loadu_pd(c + k);
    const __m256d cp = _mm256_loadu_pd(c + k + 1);
    const __m256d dl = _mm256_sub_pd(c0, cm);
    const __m256d dr = _mm256_sub_pd(cp, c0);
    const __m256d p = _mm256_mul_pd(dl, dr);
    const __m256d s = _mm256_add_pd(dl, dr);
    const __m256d pos = _mm256_cmp_pd(p, zero, _CMP_GT_OQ);
    // Lanes with p <= 0 may divide by zero; the blend discards them.
    const __m256d slope = _mm256_blendv_pd(zero, _mm256_div_pd(p, s), pos);
    _mm256_storeu_pd(out + k, _mm256_add_pd(c0, _mm256_mul_pd(vs, slope)));
  }
  for (; k < n; ++k) {
    const double dl = c[k] - c[k - 1];
    const double dr = c[k + 1] - c[k];
    const double p = dl * dr;
    const double s = dl + dr;
    const double slope = p > 0.0 ? p / s : 0.0;
    out[k] = c[k] + sign * slope;
  }
}

void flux_update(const double* cells, const double* faces, std::size_t n, double nu,
                 double* out) {
  const __m256d vnu = _mm256_set1_pd(nu);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d df = _mm256_sub_pd(_mm256_loadu_pd(faces + i + 1), _mm256_loadu_pd(faces + i));
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(cells + i), _mm256_mul_pd(vnu, df)));
  }
  for (; i < n; ++i) out[i] = cells[i] - nu * (faces[i + 1] - faces[i]);
}

void field_update(const double* up, double a, const double* dn, double b, const double* coef,
                  std::size_t n, double* out) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d t = _mm256_sub_pd(_mm256_mul_pd(va, _mm256_loadu_pd(up + i)),
                                    _mm256_mul_pd(vb, _mm256_loadu_pd(dn + i)));
    const __m256d o = _mm256_add_pd(_mm256_loadu_pd(out + i),
                                    _mm256_mul_pd(_mm256_loadu_pd(coef + i), t));
    _mm256_storeu_pd(out + i, o);
  }
  for (; i < n; ++i) out[i] = out[i] + coef[i] * (a * up[i] - b * dn[i]);
}

void axpy(double w, const double* x, std::size_t n, double* y) {
  const __m256d vw = _mm256_set1_pd(w);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes)
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i),
                                          _mm256_mul_pd(vw, _mm256_loadu_pd(x + i))));
  for (; i < n; ++i) y[i] = y[i] + w * x[i];
}

}  // namespace

extern const KernelTable kAvx2Table;
const KernelTable kAvx2Table{Isa::avx2, "avx2", thomas_batched, limited_faces,
                             flux_update, field_update, axpy};

}  // namespace vfp::kernels
