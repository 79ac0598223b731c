#include "travmap/semantics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

namespace travmap::semantics {

const char* to_string(SemanticLabel label) {
    switch (label) {
        case SemanticLabel::Grass: return "Grass";
        case SemanticLabel::Track: return "Track";
        case SemanticLabel::Vegetation: return "Vegetation";
        case SemanticLabel::Building: return "Building";
        case SemanticLabel::Pedestrian: return "Pedestrian";
        case SemanticLabel::Obstacle: return "Obstacle";
        case SemanticLabel::Other: return "Other";
    }
    return "?";
}

SemanticLabel label_from_string(const std::string& name) {
    for (SemanticLabel label : kAllLabels)
        if (name == to_string(label)) return label;
    throw InputError("unknown semantic label '" + name + "'");
}

void ClassDensityTable::validate() const {
    if (entries.empty()) throw InputError("ClassDensityTable: no entries");
    std::set<std::string> names;
    for (const auto& e : entries) {
        if (!std::isfinite(e.density_kg_m2) || e.density_kg_m2 < 0.0)
            throw InputError("ClassDensityTable: negative density for '" + e.class_name + "'");
        if (!names.insert(e.class_name).second)
            throw InputError("ClassDensityTable: duplicate class '" + e.class_name + "'");
    }
}

std::vector<double> ClassDensityTable::likelihoods(double plants_probability) const {
    std::vector<double> out;
    out.reserve(entries.size());
    for (const auto& e : entries) {
        switch (e.likelihood) {
            case LikelihoodKind::PlantsProbability: out.push_back(plants_probability); break;
            case LikelihoodKind::OneMinusPlantsProbability:
                out.push_back(1.0 - plants_probability);
                break;
            case LikelihoodKind::Uniform: out.push_back(1.0); break;
        }
    }
    return out;
}

ClassDensityTable ClassDensityTable::two_class(double plants_density, double not_plants_density) {
    ClassDensityTable table;
    table.entries = {
        {"Plants", plants_density, LikelihoodKind::PlantsProbability},
        {"NotPlants", not_plants_density, LikelihoodKind::OneMinusPlantsProbability},
    };
    return table;
}

double plants_probability(double ndvi_value) {
    if (!std::isfinite(ndvi_value)) throw InputError("plants_probability: non-finite input");
    return std::clamp((ndvi_value + 1.0) / 2.0, 0.0, 1.0);
}

double expected_mass_density(const ClassDensityTable& table,
                             const std::vector<double>& likelihoods) {
    table.validate();
    if (likelihoods.size() != table.entries.size())
        throw InputError("expected_mass_density: likelihood count != class count");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < likelihoods.size(); ++i) {
        const double p = likelihoods[i];
        if (!std::isfinite(p) || p < 0.0)
            throw InputError("expected_mass_density: invalid likelihood");
        num += table.entries[i].density_kg_m2 * p;
        den += p;
    }
    if (den == 0.0) throw InputError("expected_mass_density: uninformative measurement");
    return num / den;
}

SegmentationReport evaluate_segmentation(const std::vector<bool>& predicted,
                                         const std::vector<bool>& truth) {
    if (predicted.empty()) throw InputError("evaluate_segmentation: empty masks");
    if (predicted.size() != truth.size())
        throw InputError("evaluate_segmentation: mask length mismatch");

    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] && truth[i]) ++tp;
        else if (predicted[i]) ++fp;
        else if (truth[i]) ++fn;
        else ++tn;
    }

    SegmentationReport r;
    bool degenerate = false;
    auto safe_ratio = [&degenerate](std::size_t num, std::size_t den) {
        if (den == 0) {
            degenerate = true;
            return 0.0;
        }
        return static_cast<double>(num) / static_cast<double>(den);
    };
    r.iou = safe_ratio(tp, tp + fp + fn);
    r.precision = safe_ratio(tp, tp + fp);
    r.recall = safe_ratio(tp, tp + fn);
    r.accuracy = safe_ratio(tp + tn, tp + fp + fn + tn);
    r.specificity = safe_ratio(tn, tn + fp);
    r.f1 = (r.precision + r.recall) == 0.0
               ? (degenerate = true, 0.0)
               : 2.0 * r.precision * r.recall / (r.precision + r.recall);
    r.degenerate = degenerate;
    return r;
}

spectral::ReferenceProfile plants_reference(
    const std::vector<spectral::ReferenceProfile>& profiles) {
    std::vector<const spectral::ReferenceProfile*> sources;
    for (const auto& p : profiles)
        if (p.class_name == to_string(SemanticLabel::Grass) ||
            p.class_name == to_string(SemanticLabel::Vegetation))
            sources.push_back(&p);
    if (sources.empty())
        throw InputError("plants_reference: no Grass or Vegetation profile available");

    spectral::ReferenceProfile ref;
    ref.class_name = "Plants";
    ref.spectrum = sources.front()->spectrum;
    for (std::size_t s = 1; s < sources.size(); ++s) {
        const auto& other = sources[s]->spectrum;
        if (other.values.size() != ref.spectrum.values.size())
            throw InputError("plants_reference: profile grids differ");
        for (std::size_t i = 0; i < ref.spectrum.values.size(); ++i)
            ref.spectrum.values[i] += other.values[i];
    }
    for (double& v : ref.spectrum.values) v /= static_cast<double>(sources.size());
    return ref;
}

std::vector<SegmentationReport> benchmark_methods(
    const std::vector<LabeledMapPoint>& map, const std::vector<spectral::IndexKind>& indices,
    const std::vector<spectral::DistanceKind>& distances,
    const std::vector<spectral::ReferenceProfile>& profiles, const BenchmarkOptions& opts) {
    if (map.empty()) throw InputError("benchmark_methods: empty map");

    std::vector<bool> truth(map.size());
    for (std::size_t i = 0; i < map.size(); ++i) truth[i] = is_plants(map[i].label);

    spectral::ReferenceProfile plants_ref;
    if (!distances.empty()) plants_ref = plants_reference(profiles);

    std::vector<SegmentationReport> reports;
    reports.reserve(indices.size() + distances.size());
    std::vector<double> scores(map.size());
    std::vector<bool> predicted(map.size());

    auto run_method = [&](const std::string& name, auto&& score_fn, bool plants_high) {
        const auto t0 = std::chrono::steady_clock::now();
        for (std::size_t i = 0; i < map.size(); ++i) scores[i] = score_fn(map[i].reflectance);
        bool constant = false;
        double threshold = 0.0;
        try {
            threshold = spectral::otsu_threshold(scores, opts.otsu_bins);
        } catch (const InputError&) {
            constant = true;  // featureless score distribution, nothing to separate
        }
        for (std::size_t i = 0; i < map.size(); ++i)
            predicted[i] = constant ? false
                                    : (plants_high ? scores[i] >= threshold
                                                   : scores[i] < threshold);
        const auto t1 = std::chrono::steady_clock::now();

        SegmentationReport r = evaluate_segmentation(predicted, truth);
        r.method_name = name;
        r.degenerate = r.degenerate || constant;
        r.duration_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        reports.push_back(std::move(r));
    };

    for (spectral::IndexKind kind : indices) {
        run_method(
            spectral::to_string(kind),
            [&](const spectral::ReflectanceSpectrum& s) {
                return spectral::vegetation_index(kind, s, opts.bands);
            },
            spectral::plants_on_high_side(kind));
    }
    for (spectral::DistanceKind kind : distances) {
        run_method(
            spectral::to_string(kind),
            [&](const spectral::ReflectanceSpectrum& s) {
                return spectral::spectral_distance(kind, s, plants_ref);
            },
            /*plants_high=*/false);
    }
    return reports;
}

}  // namespace travmap::semantics
