#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "travmap/common.hpp"

namespace travmap::spectral {

// Reflectance values are clipped to this ceiling after calibration.
// Calibrated reflectance can exceed 1 on specular or noisy returns, but
// unbounded values destabilise the distance metrics downstream.
inline constexpr double kReflectanceCeiling = 1.5;

// Band lookups accept this much mismatch between a requested wavelength
// and the nearest stored band.
inline constexpr double kBandToleranceNm = 1.0;

// Raw sensor intensities on an ordered wavelength grid.
struct SpectrumSample {
    std::vector<double> wavelengths_nm;
    std::vector<double> intensities;

    void validate() const;  // InputError: size mismatch, empty, non-increasing grid
};

// Calibrated reflectance on an ordered wavelength grid.
struct ReflectanceSpectrum {
    std::vector<double> wavelengths_nm;
    std::vector<double> values;

    void validate() const;  // InputError: size mismatch, empty, non-increasing grid,
                            // value outside [0, kReflectanceCeiling]
    std::size_t size() const { return values.size(); }
};

// Linear sensor-to-reflectance model: reflectance = matrix * intensities.
// Rows map to output_wavelengths_nm, columns to the sensor band count.
struct SpectralCalibration {
    Eigen::MatrixXd matrix;
    std::vector<double> output_wavelengths_nm;

    void validate() const;  // InputError: empty matrix, row/wavelength mismatch,
                            // non-finite coefficient
};

// Class-typical reflectance used by the distance-based segmenters.
struct ReferenceProfile {
    std::string class_name;
    ReflectanceSpectrum spectrum;
};

// Dense multispectral image, band-major planes of row-major float32 pixels.
struct SpectralCube {
    int width = 0;
    int height = 0;
    std::vector<double> wavelengths_nm;
    std::vector<float> planes;  // [band][row][col]

    void validate() const;  // InputError: non-positive dims, plane size mismatch
    float at(std::size_t band, int x, int y) const {
        return planes[(band * static_cast<std::size_t>(height) + static_cast<std::size_t>(y)) *
                          static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(x)];
    }
    float& at(std::size_t band, int x, int y) {
        return planes[(band * static_cast<std::size_t>(height) + static_cast<std::size_t>(y)) *
                          static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(x)];
    }
    ReflectanceSpectrum spectrum_at(int x, int y) const;
};

enum class IndexKind { Mgrvi, Gli, Mpri, Rgbvi, Exg, Exr, Exgr, Veg, Evi, Ndvi };
enum class DistanceKind { Euclidean, BrayCurtis, SpectralAngle };

const char* to_string(IndexKind kind);
const char* to_string(DistanceKind kind);
std::array<IndexKind, 10> all_indices();
std::array<DistanceKind, 3> all_distances();

// True when vegetation sits on the high side of the score. Holds for all
// indices except Exr (a redness measure) and for none of the distances to a
// vegetation reference.
bool plants_on_high_side(IndexKind kind);

// Wavelengths the RGB+NIR index formulas read. Grids without dedicated
// blue coverage (e.g. starting at 550 nm) reuse the nearest band at or
// below 550 nm as the blue surrogate.
struct BandMap {
    double red_nm = 650.0;
    double green_nm = 550.0;
    double blue_nm = 550.0;
    double nir_nm = 810.0;

    // Snaps red/NIR requests to the grid and resolves the blue surrogate.
    static BandMap for_grid(const std::vector<double>& wavelengths_nm, double red_nm = 650.0,
                            double nir_nm = 810.0);
};

struct CalibrationStats {
    int clamped = 0;  // calibrated values clipped into [0, ceiling]
};

// reflectance = clamp(matrix * intensities, 0, ceiling) on the calibration's
// output grid. InputError when the sample band count differs from the
// matrix column count.
ReflectanceSpectrum apply_calibration(const SpectralCalibration& cal, const SpectrumSample& sample,
                                      CalibrationStats* stats = nullptr);

// Index of the stored band nearest to wavelength_nm, within kBandToleranceNm.
std::optional<std::size_t> find_band(const std::vector<double>& wavelengths_nm,
                                     double wavelength_nm);

// find_band or InputError naming the missing wavelength.
std::size_t require_band(const ReflectanceSpectrum& spectrum, double wavelength_nm);

// Scalar vegetation score of one spectrum. Ratio indices return 0 and set
// *degenerate when their denominator vanishes.
double vegetation_index(IndexKind kind, const ReflectanceSpectrum& spectrum,
                        const BandMap& bands = {}, bool* degenerate = nullptr);

// Distance between a spectrum and a reference on the identical grid.
// InputError on grid mismatch or (for the angle) a zero-norm operand.
double spectral_distance(DistanceKind kind, const ReflectanceSpectrum& spectrum,
                         const ReferenceProfile& reference);

// Otsu's threshold over a fixed-bin histogram spanning [min, max] of the
// values. Returns the lower edge of the first bin of the upper class; ties
// resolve to the lowest such edge. InputError: fewer than 2 bins, empty
// input, or a degenerate histogram (all values equal).
double otsu_threshold(const std::vector<double>& values, int bins = 256);

}  // namespace travmap::spectral
