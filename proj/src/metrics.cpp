#include "ssgn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ssgn/error.hpp"

namespace ssgn {

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01; // (K1 * L)^2 with L = 1
constexpr double kC2 = 0.03 * 0.03;

std::vector<double> ssim_window_weights() {
    std::vector<double> w(kSsimWindow);
    const double half = (kSsimWindow - 1) / 2.0;
    double sum = 0.0;
    for (int i = 0; i < kSsimWindow; ++i) {
        double d = i - half;
        w[std::size_t(i)] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
        sum += w[std::size_t(i)];
    }
    for (double& v : w) v /= sum;
    return w;
}

// Separable valid-mode filtering with the normalized Gaussian window:
// first along columns, then along rows.
std::vector<double> gauss_filter_valid(const std::vector<double>& img, int rows,
                                       int cols, const std::vector<double>& w) {
    const int k = int(w.size());
    const int crows = rows, ccols = cols - k + 1;
    std::vector<double> tmp(std::size_t(crows) * ccols, 0.0);
    for (int r = 0; r < crows; ++r)
        for (int c = 0; c < ccols; ++c) {
            double acc = 0.0;
            for (int i = 0; i < k; ++i)
                acc += w[std::size_t(i)] * img[std::size_t(r) * cols + c + i];
            tmp[std::size_t(r) * ccols + c] = acc;
        }
    const int orows = rows - k + 1;
    std::vector<double> out(std::size_t(orows) * ccols, 0.0);
    for (int r = 0; r < orows; ++r)
        for (int c = 0; c < ccols; ++c) {
            double acc = 0.0;
            for (int i = 0; i < k; ++i)
                acc += w[std::size_t(i)] * tmp[std::size_t(r + i) * ccols + c];
            out[std::size_t(r) * ccols + c] = acc;
        }
    return out;
}

void check_same_dims(const Band& a, const Band& b, const char* who) {
    require(a.rows == b.rows && a.cols == b.cols,
            std::string(who) + ": band dimensions differ");
}

} // namespace

double psnr(const Band& ref, const Band& test) {
    check_same_dims(ref, test, "psnr");
    double mse_sum = 0.0;
    for (std::size_t i = 0; i < ref.data.size(); ++i) {
        double d = test.data[i] - ref.data[i];
        mse_sum += d * d;
    }
    if (mse_sum == 0.0) return 99.0;
    double mse = mse_sum / double(ref.data.size());
    return std::min(99.0, 10.0 * std::log10(1.0 / mse));
}

double ssim(const Band& ref, const Band& test) {
    check_same_dims(ref, test, "ssim");
    require(ref.rows >= kSsimWindow && ref.cols >= kSsimWindow,
            "ssim: band smaller than the 11x11 window");

    static const std::vector<double> w = ssim_window_weights();
    const int rows = ref.rows, cols = ref.cols;
    const std::size_t n = ref.data.size();

    std::vector<double> xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
        xx[i] = ref.data[i] * ref.data[i];
        yy[i] = test.data[i] * test.data[i];
        xy[i] = ref.data[i] * test.data[i];
    }
    auto mu_x = gauss_filter_valid(ref.data, rows, cols, w);
    auto mu_y = gauss_filter_valid(test.data, rows, cols, w);
    auto m_xx = gauss_filter_valid(xx, rows, cols, w);
    auto m_yy = gauss_filter_valid(yy, rows, cols, w);
    auto m_xy = gauss_filter_valid(xy, rows, cols, w);

    double total = 0.0;
    for (std::size_t i = 0; i < mu_x.size(); ++i) {
        double mx = mu_x[i], my = mu_y[i];
        double vx = m_xx[i] - mx * mx;
        double vy = m_yy[i] - my * my;
        double cxy = m_xy[i] - mx * my;
        double num = (2.0 * mx * my + kC1) * (2.0 * cxy + kC2);
        double den = (mx * mx + my * my + kC1) * (vx + vy + kC2);
        total += num / den;
    }
    return total / double(mu_x.size());
}

double msa(const HsiCube& ref, const HsiCube& test) {
    require(ref.rows == test.rows && ref.cols == test.cols &&
                ref.bands == test.bands,
            "msa: cube dimensions differ");
    require(ref.bands >= 2, "msa: at least two bands required");

    const std::size_t pixels = ref.band_size();
    const int bands = ref.bands;
    std::vector<double> u(static_cast<std::size_t>(bands));
    std::vector<double> v(static_cast<std::size_t>(bands));
    double total = 0.0;
    for (std::size_t p = 0; p < pixels; ++p) {
        double nr = 0.0, nt = 0.0;
        for (int b = 0; b < bands; ++b) {
            double r = ref.data[std::size_t(b) * pixels + p];
            double t = test.data[std::size_t(b) * pixels + p];
            u[std::size_t(b)] = r;
            v[std::size_t(b)] = t;
            nr += r * r;
            nt += t * t;
        }
        if (nr == 0.0 || nt == 0.0) continue; // dead spectra contribute 0
        // half-angle form of arccos(<r,t>/(|r||t|)); zero is exact for
        // identical spectra, which acos near 1 cannot deliver
        double inv_r = 1.0 / std::sqrt(nr), inv_t = 1.0 / std::sqrt(nt);
        double diff = 0.0, sum = 0.0;
        for (int b = 0; b < bands; ++b) {
            double a = u[std::size_t(b)] * inv_r;
            double c = v[std::size_t(b)] * inv_t;
            diff += (a - c) * (a - c);
            sum += (a + c) * (a + c);
        }
        total += 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum)) * 180.0 /
                 std::numbers::pi;
    }
    return total / double(pixels);
}

MetricsReport evaluate(const HsiCube& ref, const HsiCube& test) {
    require(ref.rows == test.rows && ref.cols == test.cols &&
                ref.bands == test.bands,
            "evaluate: cube dimensions differ");
    MetricsReport report;
    report.per_band_psnr.reserve(std::size_t(ref.bands));
    report.per_band_ssim.reserve(std::size_t(ref.bands));
    double psnr_sum = 0.0, ssim_sum = 0.0;
    for (int b = 0; b < ref.bands; ++b) {
        Band rb = ref.band_copy(b);
        Band tb = test.band_copy(b);
        double p = psnr(rb, tb);
        double s = ssim(rb, tb);
        report.per_band_psnr.push_back(p);
        report.per_band_ssim.push_back(s);
        psnr_sum += p;
        ssim_sum += s;
    }
    report.mpsnr = psnr_sum / double(ref.bands);
    report.mssim = ssim_sum / double(ref.bands);
    report.msa = msa(ref, test);
    return report;
}

std::string render_report(const MetricsReport& report) {
    std::ostringstream out;
    out.precision(6);
    out << std::fixed;
    out << "MPSNR " << report.mpsnr << " MSSIM " << report.mssim << " MSA "
        << report.msa << "\n";
    for (std::size_t b = 0; b < report.per_band_psnr.size(); ++b)
        out << "band " << b << " psnr " << report.per_band_psnr[b] << " ssim "
            << report.per_band_ssim[b] << "\n";
    return out.str();
}

} // namespace ssgn
