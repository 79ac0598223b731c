#include "travmap/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace travmap::spectral {

namespace {

void check_grid(const std::vector<double>& wavelengths, std::size_t values,
                const char* who) {
    if (wavelengths.empty()) throw InputError(std::string(who) + ": empty wavelength grid");
    if (wavelengths.size() != values)
        throw InputError(std::string(who) + ": wavelength/value count mismatch");
    for (std::size_t i = 0; i < wavelengths.size(); ++i) {
        if (!std::isfinite(wavelengths[i]) || wavelengths[i] < 0)
            throw InputError(std::string(who) + ": invalid wavelength");
        if (i > 0 && wavelengths[i] <= wavelengths[i - 1])
            throw InputError(std::string(who) + ": wavelengths not strictly increasing");
    }
}

}  // namespace

void SpectrumSample::validate() const {
    check_grid(wavelengths_nm, intensities.size(), "SpectrumSample");
    for (double v : intensities)
        if (!std::isfinite(v)) throw InputError("SpectrumSample: non-finite intensity");
}

void ReflectanceSpectrum::validate() const {
    check_grid(wavelengths_nm, values.size(), "ReflectanceSpectrum");
    for (double v : values)
        if (!std::isfinite(v) || v < 0.0 || v > kReflectanceCeiling)
            throw InputError("ReflectanceSpectrum: value outside [0, 1.5]");
}

void SpectralCalibration::validate() const {
    if (matrix.rows() == 0 || matrix.cols() == 0)
        throw InputError("SpectralCalibration: empty matrix");
    if (static_cast<std::size_t>(matrix.rows()) != output_wavelengths_nm.size())
        throw InputError("SpectralCalibration: row count != output wavelength count");
    check_grid(output_wavelengths_nm, output_wavelengths_nm.size(), "SpectralCalibration");
    if (!matrix.allFinite()) throw InputError("SpectralCalibration: non-finite coefficient");
}

void SpectralCube::validate() const {
    if (width <= 0 || height <= 0) throw InputError("SpectralCube: non-positive dimensions");
    check_grid(wavelengths_nm, wavelengths_nm.size(), "SpectralCube");
    const std::size_t expected = wavelengths_nm.size() * static_cast<std::size_t>(width) *
                                 static_cast<std::size_t>(height);
    if (planes.size() != expected) throw InputError("SpectralCube: plane size mismatch");
}

ReflectanceSpectrum SpectralCube::spectrum_at(int x, int y) const {
    ReflectanceSpectrum s;
    s.wavelengths_nm = wavelengths_nm;
    s.values.resize(wavelengths_nm.size());
    for (std::size_t b = 0; b < wavelengths_nm.size(); ++b) s.values[b] = at(b, x, y);
    return s;
}

const char* to_string(IndexKind kind) {
    switch (kind) {
        case IndexKind::Mgrvi: return "mgrvi";
        case IndexKind::Gli: return "gli";
        case IndexKind::Mpri: return "mpri";
        case IndexKind::Rgbvi: return "rgbvi";
        case IndexKind::Exg: return "exg";
        case IndexKind::Exr: return "exr";
        case IndexKind::Exgr: return "exgr";
        case IndexKind::Veg: return "veg";
        case IndexKind::Evi: return "evi";
        case IndexKind::Ndvi: return "ndvi";
    }
    return "?";
}

const char* to_string(DistanceKind kind) {
    switch (kind) {
        case DistanceKind::Euclidean: return "ed";
        case DistanceKind::BrayCurtis: return "bc";
        case DistanceKind::SpectralAngle: return "sa";
    }
    return "?";
}

std::array<IndexKind, 10> all_indices() {
    return {IndexKind::Mgrvi, IndexKind::Gli,  IndexKind::Mpri, IndexKind::Rgbvi,
            IndexKind::Exg,   IndexKind::Exr,  IndexKind::Exgr, IndexKind::Veg,
            IndexKind::Evi,   IndexKind::Ndvi};
}

std::array<DistanceKind, 3> all_distances() {
    return {DistanceKind::Euclidean, DistanceKind::BrayCurtis, DistanceKind::SpectralAngle};
}

bool plants_on_high_side(IndexKind kind) { return kind != IndexKind::Exr; }

BandMap BandMap::for_grid(const std::vector<double>& wavelengths_nm, double red_nm,
                          double nir_nm) {
    if (wavelengths_nm.empty()) throw InputError("BandMap: empty wavelength grid");
    auto nearest = [&](double target) {
        double best = wavelengths_nm.front();
        for (double w : wavelengths_nm)
            if (std::abs(w - target) < std::abs(best - target)) best = w;
        return best;
    };
    BandMap map;
    map.red_nm = nearest(red_nm);
    map.green_nm = nearest(550.0);
    map.nir_nm = nearest(nir_nm);
    // Blue surrogate: the highest band at or below 550 nm, else the green band.
    double best_low = -1.0;
    for (double w : wavelengths_nm)
        if (w <= 550.0 && w > best_low) best_low = w;
    map.blue_nm = best_low >= 0.0 ? best_low : map.green_nm;
    return map;
}

ReflectanceSpectrum apply_calibration(const SpectralCalibration& cal, const SpectrumSample& sample,
                                      CalibrationStats* stats) {
    cal.validate();
    sample.validate();
    if (static_cast<std::size_t>(cal.matrix.cols()) != sample.intensities.size())
        throw InputError("apply_calibration: sample band count != matrix column count");

    Eigen::Map<const Eigen::VectorXd> i(sample.intensities.data(), sample.intensities.size());
    Eigen::VectorXd r = cal.matrix * i;

    ReflectanceSpectrum out;
    out.wavelengths_nm = cal.output_wavelengths_nm;
    out.values.resize(r.size());
    int clamped = 0;
    for (Eigen::Index k = 0; k < r.size(); ++k) {
        double v = r[k];
        if (v < 0.0 || v > kReflectanceCeiling) {
            ++clamped;
            v = std::clamp(v, 0.0, kReflectanceCeiling);
        }
        out.values[static_cast<std::size_t>(k)] = v;
    }
    if (stats) stats->clamped += clamped;
    return out;
}

std::optional<std::size_t> find_band(const std::vector<double>& wavelengths_nm,
                                     double wavelength_nm) {
    std::optional<std::size_t> best;
    double best_err = kBandToleranceNm;
    for (std::size_t i = 0; i < wavelengths_nm.size(); ++i) {
        const double err = std::abs(wavelengths_nm[i] - wavelength_nm);
        if (err <= best_err) {
            best = i;
            best_err = err;
        }
    }
    return best;
}

std::size_t require_band(const ReflectanceSpectrum& spectrum, double wavelength_nm) {
    auto idx = find_band(spectrum.wavelengths_nm, wavelength_nm);
    if (!idx)
        throw InputError("missing required channel at " + std::to_string(wavelength_nm) + " nm");
    return *idx;
}

double vegetation_index(IndexKind kind, const ReflectanceSpectrum& spectrum, const BandMap& bands,
                        bool* degenerate) {
    if (degenerate) *degenerate = false;
    auto flag = [&] {
        if (degenerate) *degenerate = true;
        return 0.0;
    };
    auto ratio = [&](double num, double den) { return den == 0.0 ? flag() : num / den; };

    const auto channel = [&](double nm) { return spectrum.values[require_band(spectrum, nm)]; };

    switch (kind) {
        case IndexKind::Ndvi: {
            const double r = channel(bands.red_nm), nir = channel(bands.nir_nm);
            return ratio(nir - r, nir + r);
        }
        case IndexKind::Evi: {
            const double r = channel(bands.red_nm), b = channel(bands.blue_nm),
                         nir = channel(bands.nir_nm);
            return ratio(2.5 * (nir - r), nir + 6.0 * r - 7.5 * b + 1.0);
        }
        case IndexKind::Mgrvi: {
            const double g = channel(bands.green_nm), r = channel(bands.red_nm);
            return ratio(g * g - r * r, g * g + r * r);
        }
        case IndexKind::Gli: {
            const double g = channel(bands.green_nm), r = channel(bands.red_nm),
                         b = channel(bands.blue_nm);
            return ratio(2.0 * g - r - b, 2.0 * g + r + b);
        }
        case IndexKind::Mpri: {
            const double g = channel(bands.green_nm), r = channel(bands.red_nm);
            return ratio(g - r, g + r);
        }
        case IndexKind::Rgbvi: {
            const double g = channel(bands.green_nm), r = channel(bands.red_nm),
                         b = channel(bands.blue_nm);
            return ratio(g * g - b * r, g * g + b * r);
        }
        case IndexKind::Exg: {
            const double g = channel(bands.green_nm), r = channel(bands.red_nm),
                         b = channel(bands.blue_nm);
            return 2.0 * g - r - b;
        }
        case IndexKind::Exr: {
            const double g = channel(bands.green_nm), r = channel(bands.red_nm);
            return 1.4 * r - g;
        }
        case IndexKind::Exgr: {
            const double g = channel(bands.green_nm), r = channel(bands.red_nm),
                         b = channel(bands.blue_nm);
            return (2.0 * g - r - b) - (1.4 * r - g);
        }
        case IndexKind::Veg: {
            const double g = channel(bands.green_nm), r = channel(bands.red_nm),
                         b = channel(bands.blue_nm);
            if (r <= 0.0 || b <= 0.0) return flag();
            return g / (std::pow(r, 0.667) * std::pow(b, 0.333));
        }
    }
    throw InputError("vegetation_index: unknown kind");
}

double spectral_distance(DistanceKind kind, const ReflectanceSpectrum& spectrum,
                         const ReferenceProfile& reference) {
    const auto& x = spectrum;
    const auto& r = reference.spectrum;
    if (x.values.size() != r.values.size())
        throw InputError("spectral_distance: wavelength grid mismatch");
    for (std::size_t i = 0; i < x.wavelengths_nm.size(); ++i)
        if (std::abs(x.wavelengths_nm[i] - r.wavelengths_nm[i]) > 1e-9)
            throw InputError("spectral_distance: wavelength grid mismatch");

    switch (kind) {
        case DistanceKind::Euclidean: {
            double acc = 0.0;
            for (std::size_t i = 0; i < x.values.size(); ++i) {
                const double d = x.values[i] - r.values[i];
                acc += d * d;
            }
            return std::sqrt(acc);
        }
        case DistanceKind::BrayCurtis: {
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < x.values.size(); ++i) {
                num += std::abs(x.values[i] - r.values[i]);
                den += x.values[i] + r.values[i];
            }
            return den == 0.0 ? 0.0 : num / den;
        }
        case DistanceKind::SpectralAngle: {
            double dot = 0.0, nx = 0.0, nr = 0.0;
            for (std::size_t i = 0; i < x.values.size(); ++i) {
                dot += x.values[i] * r.values[i];
                nx += x.values[i] * x.values[i];
                nr += r.values[i] * r.values[i];
            }
            if (nx == 0.0 || nr == 0.0)
                throw InputError("spectral_distance: zero-norm vector has no angle");
            const double c = std::clamp(dot / (std::sqrt(nx) * std::sqrt(nr)), -1.0, 1.0);
            return std::acos(c);
        }
    }
    throw InputError("spectral_distance: unknown kind");
}

double otsu_threshold(const std::vector<double>& values, int bins) {
    if (values.empty()) throw InputError("otsu_threshold: empty input");
    if (bins < 2) throw InputError("otsu_threshold: needs at least 2 bins");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) throw InputError("otsu_threshold: degenerate histogram");

    const double bin_width = (hi - lo) / bins;
    std::vector<std::size_t> hist(static_cast<std::size_t>(bins), 0);
    for (double v : values) {
        auto b = static_cast<std::size_t>((v - lo) / bin_width);
        if (b >= hist.size()) b = hist.size() - 1;  // v == hi lands in the top bin
        ++hist[b];
    }

    // Between-class variance via prefix sums; bin i's representative value
    // is its center.
    const double total = static_cast<double>(values.size());
    double total_weighted = 0.0;
    for (int i = 0; i < bins; ++i)
        total_weighted += static_cast<double>(hist[static_cast<std::size_t>(i)]) *
                          (lo + (i + 0.5) * bin_width);

    double best_var = -1.0;
    int best_edge = 1;
    double count0 = 0.0, weighted0 = 0.0;
    for (int k = 1; k < bins; ++k) {
        const std::size_t h = hist[static_cast<std::size_t>(k - 1)];
        count0 += static_cast<double>(h);
        weighted0 += static_cast<double>(h) * (lo + (k - 0.5) * bin_width);
        const double count1 = total - count0;
        if (count0 == 0.0 || count1 == 0.0) continue;
        const double mu0 = weighted0 / count0;
        const double mu1 = (total_weighted - weighted0) / count1;
        const double w0 = count0 / total, w1 = count1 / total;
        const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (var > best_var) {
            best_var = var;
            best_edge = k;
        }
    }
    return lo + best_edge * bin_width;
}

}  // namespace travmap::spectral
