#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "travmap/rng.hpp"
#include "travmap/scenario.hpp"
#include "travmap/semantics.hpp"

using namespace travmap;
using semantics::ClassDensityTable;
using semantics::LabeledMapPoint;
using semantics::SemanticLabel;

namespace {

// Confusion counts rebuilt from index sets, not per-element branching.
struct SetCounts {
    std::size_t tp, fp, fn, tn;
};

SetCounts set_counts(const std::vector<bool>& predicted, const std::vector<bool>& truth) {
    std::set<std::size_t> pred_pos, truth_pos, all;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        all.insert(i);
        if (predicted[i]) pred_pos.insert(i);
        if (truth[i]) truth_pos.insert(i);
    }
    std::vector<std::size_t> tp_set, fp_set, fn_set;
    std::set_intersection(pred_pos.begin(), pred_pos.end(), truth_pos.begin(), truth_pos.end(),
                          std::back_inserter(tp_set));
    std::set_difference(pred_pos.begin(), pred_pos.end(), truth_pos.begin(), truth_pos.end(),
                        std::back_inserter(fp_set));
    std::set_difference(truth_pos.begin(), truth_pos.end(), pred_pos.begin(), pred_pos.end(),
                        std::back_inserter(fn_set));
    return {tp_set.size(), fp_set.size(), fn_set.size(),
            all.size() - tp_set.size() - fp_set.size() - fn_set.size()};
}

LabeledMapPoint labeled_point(SemanticLabel label, const spectral::ReflectanceSpectrum& spectrum,
                              double x = 0.0) {
    LabeledMapPoint p;
    p.position = Eigen::Vector3d(x, 0.0, 0.0);
    p.label = label;
    p.reflectance = spectrum;
    return p;
}

}  // namespace

TEST_CASE("plants probability is the affine ndvi map") {
    CHECK(semantics::plants_probability(1.0) == 1.0);
    CHECK(semantics::plants_probability(-1.0) == 0.0);
    CHECK(semantics::plants_probability(0.0) == 0.5);
    CHECK(semantics::plants_probability(2.0) == 1.0);
    CHECK(semantics::plants_probability(-3.0) == 0.0);
}

TEST_CASE("two-class table layout") {
    const auto table = ClassDensityTable::two_class(20.0, 2400.0);
    REQUIRE(table.entries.size() == 2);
    CHECK(table.entries[0].class_name == "Plants");
    CHECK(table.entries[0].density_kg_m2 == 20.0);
    CHECK(table.entries[1].class_name == "NotPlants");
    CHECK(table.entries[1].density_kg_m2 == 2400.0);
    CHECK_NOTHROW(table.validate());

    const auto l1 = table.likelihoods(1.0);
    CHECK(l1[0] == 1.0);
    CHECK(l1[1] == 0.0);
    const auto l0 = table.likelihoods(0.25);
    CHECK(l0[0] == 0.25);
    CHECK(l0[1] == 0.75);
}

TEST_CASE("expected density: certainty, midpoint, constant invariance") {
    const auto table = ClassDensityTable::two_class(20.0, 2400.0);
    CHECK(semantics::expected_mass_density(table, {1.0, 0.0}) == doctest::Approx(20.0));
    CHECK(semantics::expected_mass_density(table, {0.0, 1.0}) == doctest::Approx(2400.0));
    CHECK(semantics::expected_mass_density(table, {0.5, 0.5}) == doctest::Approx(1210.0));

    const auto constant = ClassDensityTable::two_class(70.0, 70.0);
    rng::SplitMix64 gen(5);
    for (int i = 0; i < 20; ++i) {
        const double a = gen.uniform01(), b = gen.uniform01();
        if (a + b == 0.0) continue;
        CHECK(semantics::expected_mass_density(constant, {a, b}) ==
              doctest::Approx(70.0).epsilon(1e-12));
    }
}

TEST_CASE("expected density is invariant to likelihood rescaling") {
    const auto table = ClassDensityTable::two_class(20.0, 2400.0);
    rng::SplitMix64 gen(6);
    for (int i = 0; i < 100; ++i) {
        const double a = gen.uniform01(), b = gen.uniform01();
        if (a + b == 0.0) continue;
        const double k = 0.001 + 50.0 * gen.uniform01();
        CHECK(semantics::expected_mass_density(table, {a, b}) ==
              doctest::Approx(semantics::expected_mass_density(table, {a * k, b * k}))
                  .epsilon(1e-12));
    }
}

TEST_CASE("expected density is monotone in the denser class's likelihood") {
    const auto table = ClassDensityTable::two_class(20.0, 2400.0);
    double prev = semantics::expected_mass_density(table, {1.0, 0.0});
    for (double q = 0.05; q <= 1.0; q += 0.05) {
        const double cur = semantics::expected_mass_density(table, {1.0, q});
        CHECK(cur >= prev);
        prev = cur;
    }
    CHECK(semantics::expected_mass_density(table, {1.0, 1.0}) <=
          semantics::expected_mass_density(table, {0.5, 1.0}));
}

TEST_CASE("expected density stays within the table's density range") {
    rng::SplitMix64 gen(7);
    for (int trial = 0; trial < 100; ++trial) {
        ClassDensityTable table;
        const int n = 1 + static_cast<int>(gen.index(6));
        std::vector<double> likelihoods;
        double lo = 1e9, hi = -1.0;
        for (int c = 0; c < n; ++c) {
            semantics::ClassDensity entry;
            entry.class_name = "c" + std::to_string(c);
            entry.density_kg_m2 = 2500.0 * gen.uniform01();
            table.entries.push_back(entry);
            likelihoods.push_back(gen.uniform01());
            lo = std::min(lo, entry.density_kg_m2);
            hi = std::max(hi, entry.density_kg_m2);
        }
        likelihoods[0] += 1e-6;  // guarantees a nonzero sum
        const double e = semantics::expected_mass_density(table, likelihoods);
        CHECK(e >= lo - 1e-9);
        CHECK(e <= hi + 1e-9);
    }
}

TEST_CASE("expected density error cases") {
    const auto table = ClassDensityTable::two_class(20.0, 2400.0);
    CHECK_THROWS_WITH_AS(
        static_cast<void>(semantics::expected_mass_density(table, {0.0, 0.0})),
        doctest::Contains("uninformative"), InputError);
    CHECK_THROWS_AS(static_cast<void>(semantics::expected_mass_density(table, {1.0})),
                    InputError);
    CHECK_THROWS_AS(static_cast<void>(semantics::expected_mass_density(table, {1.0, -0.5})),
                    InputError);
}

TEST_CASE("segmentation metrics: frozen set-counting case") {
    // predicted positives {a,b}, truth positives {b,c}, universe {a,b,c,d}
    const std::vector<bool> predicted = {true, true, false, false};
    const std::vector<bool> truth = {false, true, true, false};
    const auto r = semantics::evaluate_segmentation(predicted, truth);
    CHECK(r.iou == doctest::Approx(1.0 / 3.0));
    CHECK(r.precision == doctest::Approx(0.5));
    CHECK(r.recall == doctest::Approx(0.5));
    CHECK(r.accuracy == doctest::Approx(0.5));
    CHECK(r.specificity == doctest::Approx(0.5));
    CHECK(r.f1 == doctest::Approx(0.5));
    CHECK_FALSE(r.degenerate);
}

TEST_CASE("segmentation metrics: perfect and disjoint predictions") {
    const std::vector<bool> truth = {true, false, true, false};
    const auto perfect = semantics::evaluate_segmentation(truth, truth);
    CHECK(perfect.iou == 1.0);
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);
    CHECK(perfect.accuracy == 1.0);
    CHECK(perfect.f1 == 1.0);
    CHECK(perfect.specificity == 1.0);

    std::vector<bool> inverted;
    for (bool b : truth) inverted.push_back(!b);
    const auto disjoint = semantics::evaluate_segmentation(inverted, truth);
    CHECK(disjoint.iou == 0.0);
    CHECK(disjoint.accuracy == 0.0);
}

TEST_CASE("segmentation metrics: degenerate denominators flag and zero") {
    const auto no_positives =
        semantics::evaluate_segmentation({false, false}, {false, false});
    CHECK(no_positives.degenerate);
    CHECK(no_positives.iou == 0.0);
    CHECK(no_positives.recall == 0.0);
    CHECK(no_positives.precision == 0.0);
    CHECK(no_positives.accuracy == 1.0);

    CHECK_THROWS_AS(static_cast<void>(semantics::evaluate_segmentation({true}, {true, false})),
                    InputError);
    CHECK_THROWS_AS(static_cast<void>(semantics::evaluate_segmentation({}, {})), InputError);
}

TEST_CASE("segmentation metrics equal brute-force confusion counting") {
    rng::SplitMix64 gen(8);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + gen.index(300);
        std::vector<bool> predicted, truth;
        for (std::size_t i = 0; i < n; ++i) {
            predicted.push_back(gen.uniform01() < 0.4);
            truth.push_back(gen.uniform01() < 0.6);
        }
        const auto r = semantics::evaluate_segmentation(predicted, truth);
        const auto c = set_counts(predicted, truth);
        const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp),
                     fn = static_cast<double>(c.fn), tn = static_cast<double>(c.tn);
        if (tp + fp + fn > 0) CHECK(r.iou == doctest::Approx(tp / (tp + fp + fn)));
        if (tp + fp > 0) CHECK(r.precision == doctest::Approx(tp / (tp + fp)));
        if (tp + fn > 0) CHECK(r.recall == doctest::Approx(tp / (tp + fn)));
        if (tn + fp > 0) CHECK(r.specificity == doctest::Approx(tn / (tn + fp)));
        CHECK(r.accuracy == doctest::Approx((tp + tn) / static_cast<double>(n)));
        if (r.precision + r.recall > 0 && !r.degenerate)
            CHECK(r.f1 == doctest::Approx(2.0 * r.precision * r.recall /
                                          (r.precision + r.recall)));
    }
}

TEST_CASE("benchmark produces one report per method, named and timed") {
    const auto grid = scenario::standard_band_grid();
    const auto profiles = scenario::reference_profiles(grid);
    std::vector<LabeledMapPoint> map;
    for (int i = 0; i < 40; ++i) {
        const bool plant = i % 2 == 0;
        map.push_back(labeled_point(
            plant ? SemanticLabel::Grass : SemanticLabel::Track,
            scenario::profile_for(profiles, plant ? SemanticLabel::Grass : SemanticLabel::Track)
                .spectrum,
            0.1 * i));
    }
    const auto indices = spectral::all_indices();
    const auto distances = spectral::all_distances();
    const auto reports = semantics::benchmark_methods(
        map, {indices.begin(), indices.end()}, {distances.begin(), distances.end()}, profiles,
        {spectral::BandMap::for_grid(grid), 64});
    REQUIRE(reports.size() == 13);
    std::set<std::string> names;
    for (const auto& r : reports) {
        names.insert(r.method_name);
        CHECK(r.duration_ms >= 0.0);
    }
    CHECK(names.size() == 13);
    CHECK(names.count("ndvi") == 1);
    CHECK(names.count("sa") == 1);

    // Two cleanly separated classes: ndvi + Otsu must nail the split.
    const auto ndvi_report = *std::find_if(reports.begin(), reports.end(),
                                           [](const auto& r) { return r.method_name == "ndvi"; });
    CHECK(ndvi_report.iou == doctest::Approx(1.0));
}

TEST_CASE("benchmark flags constant-score methods as degenerate") {
    const auto grid = scenario::standard_band_grid();
    const auto profiles = scenario::reference_profiles(grid);
    const auto spectrum = scenario::profile_for(profiles, SemanticLabel::Grass).spectrum;
    std::vector<LabeledMapPoint> map;
    for (int i = 0; i < 10; ++i)
        map.push_back(labeled_point(i < 5 ? SemanticLabel::Grass : SemanticLabel::Track,
                                    spectrum, 0.1 * i));
    const auto reports = semantics::benchmark_methods(
        map, {spectral::IndexKind::Ndvi}, {}, profiles,
        {spectral::BandMap::for_grid(grid), 64});
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].degenerate);
}

TEST_CASE("benchmark rejects an empty map") {
    CHECK_THROWS_AS(static_cast<void>(semantics::benchmark_methods(
                        {}, {spectral::IndexKind::Ndvi}, {}, {})),
                    InputError);
}

TEST_CASE("plants reference is the grass/vegetation mean") {
    const auto grid = scenario::standard_band_grid();
    const auto profiles = scenario::reference_profiles(grid);
    const auto ref = semantics::plants_reference(profiles);
    const auto& grass = scenario::profile_for(profiles, SemanticLabel::Grass).spectrum;
    const auto& veg = scenario::profile_for(profiles, SemanticLabel::Vegetation).spectrum;
    REQUIRE(ref.spectrum.values.size() == grass.values.size());
    for (std::size_t i = 0; i < grass.values.size(); ++i)
        CHECK(ref.spectrum.values[i] ==
              doctest::Approx(0.5 * (grass.values[i] + veg.values[i])).epsilon(1e-12));

    CHECK_THROWS_AS(static_cast<void>(semantics::plants_reference({})), InputError);
}

TEST_CASE("label round-trips through names") {
    for (auto label : semantics::kAllLabels)
        CHECK(semantics::label_from_string(semantics::to_string(label)) == label);
    CHECK_THROWS_AS(static_cast<void>(semantics::label_from_string("Lawn")), InputError);
}

TEST_CASE("density table validation") {
    ClassDensityTable empty;
    CHECK_THROWS_AS(empty.validate(), InputError);

    ClassDensityTable dup;
    dup.entries.push_back({"Plants", 20.0, semantics::LikelihoodKind::PlantsProbability});
    dup.entries.push_back({"Plants", 30.0, semantics::LikelihoodKind::Uniform});
    CHECK_THROWS_AS(dup.validate(), InputError);

    ClassDensityTable negative;
    negative.entries.push_back({"X", -1.0, semantics::LikelihoodKind::Uniform});
    CHECK_THROWS_AS(negative.validate(), InputError);
}
