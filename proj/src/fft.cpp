#include "microseg/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace microseg {

namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

void run_dft(const std::complex<double>* in, std::complex<double>* out, int width, int height,
             int sign) {
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    // FFTW is row-major: n0 = height, n1 = width.
    plan = fftw_plan_dft_2d(height, width,
                            reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                            reinterpret_cast<fftw_complex*>(out), sign,
                            FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
}

}  // namespace

Spectrum fft2(const Image& img) {
  if (img.width <= 0 || img.height <= 0 || img.data.empty())
    throw std::invalid_argument("fft2: zero-sized grid");
  std::vector<std::complex<double>> in(img.size());
  for (size_t i = 0; i < img.size(); ++i) in[i] = {img.data[i], 0.0};
  Spectrum spec(img.width, img.height);
  run_dft(in.data(), spec.data.data(), img.width, img.height, FFTW_FORWARD);
  return spec;
}

std::vector<std::complex<double>> ifft2_complex(const Spectrum& spec) {
  if (spec.width <= 0 || spec.height <= 0 || spec.data.empty())
    throw std::invalid_argument("ifft2: zero-sized grid");
  std::vector<std::complex<double>> out(spec.data.size());
  run_dft(spec.data.data(), out.data(), spec.width, spec.height, FFTW_BACKWARD);
  const double scale = 1.0 / (static_cast<double>(spec.width) * spec.height);
  for (auto& v : out) v *= scale;
  return out;
}

Image ifft2(const Spectrum& spec) {
  auto full = ifft2_complex(spec);
  Image img(spec.width, spec.height);
  for (size_t i = 0; i < full.size(); ++i) img.data[i] = full[i].real();
  return img;
}

}  // namespace microseg
