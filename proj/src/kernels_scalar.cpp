#include "vfp/kernels.hpp"

namespace vfp::kernels {

namespace {

void thomas_batched(const double* a, const double* den, const double* cp, std::size_t nrows,
                    double* data, std::size_t width) {
  if (nrows == 0) return;
  double* r0 = data;
  for (std::size_t i = 0; i < width; ++i) r0[i] = r0[i] / den[0];
  for (std::size_t j = 1; j < nrows; ++j) {
    double* r = data + j * width;
    const double* prev = r - width;
    const double aj = a[j];
    const double dj = den[j];
    for (std::size_t i = 0; i < width; ++i) r[i] = (r[i] - aj * prev[i]) / dj;
  }
  for (std::size_t j = nrows - 1; j-- > 0;) {
    double* r = data + j * width;
    const double* next = r + width;
    const double cj = cp[j];
    for (std::size_t i = 0; i < width; ++i) r[i] = r[i] - cj * next[i];
  }
}

void limited_faces(const double* c, std::size_t n, double sign, double* out) {
  for (std::size_t k = 0; k < n; ++k) {
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
  for (std::size_t i = 0; i < n; ++i) out[i] = cells[i] - nu * (faces[i + 1] - faces[i]);
}

void field_update(const double* up, double a, const double* dn, double b, const double* coef,
                  std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = out[i] + coef[i] * (a * up[i] - b * dn[i]);
}

void axpy(double w, const double* x, std::size_t n, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + w * x[i];
}

const KernelTable kScalar{Isa::scalar, "scalar", thomas_batched, limited_faces,
                          flux_update,  field_update, axpy};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace vfp::kernels
