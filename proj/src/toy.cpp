#include "synthwright/toy.hpp"

#include <array>
#include <string>
#include <vector>

#include "synthwright/rng.hpp"

namespace synthwright {

namespace {

template <std::size_t K>
std::size_t pick(Rng& rng, const std::array<double, K>& probs) {
    double u = rng.uniform01();
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < K; ++i) {
        cum += probs[i];
        if (u < cum) return i;
    }
    return K - 1;
}

} // namespace

Dataset make_toy_dataset(std::size_t n, std::uint64_t seed) {
    const std::array<std::string, 2> genders{"M", "F"};
    const std::array<std::string, 3> ages{"young", "middle", "senior"};
    const std::array<std::string, 3> educations{"primary", "secondary", "tertiary"};
    const std::array<std::string, 3> intelligences{"low", "medium", "high"};

    // education probabilities by (gender, age) pair; the skew toward primary
    // keeps education's entropy below gender's so the dependency points
    // gender -> education, and {F, senior} is exactly 1:2:3.
    const std::array<std::array<double, 3>, 6> education_probs{{
        {0.97, 0.02, 0.01},              // M, young
        {0.96, 0.03, 0.01},              // M, middle
        {0.87, 0.08, 0.05},              // M, senior
        {0.86, 0.12, 0.02},              // F, young
        {0.81, 0.16, 0.03},              // F, middle
        {1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0} // F, senior
    }};
    const std::array<double, 3> married_rate{0.90, 0.45, 0.30}; // by education

    Rng rng(seed);
    Column gender{"gender", ColumnKind::Categorical, {}, {}, false};
    Column age{"age-grp", ColumnKind::Categorical, {}, {}, false};
    Column education{"education", ColumnKind::Categorical, {}, {}, false};
    Column marital{"marital", ColumnKind::Categorical, {}, {}, false};
    Column intelligence{"intelligence", ColumnKind::Categorical, {}, {}, false};
    Column salary{"salary", ColumnKind::Numeric, {}, {}, false};
    Column loan{"loan", ColumnKind::Categorical, {}, {}, false};

    for (std::size_t r = 0; r < n; ++r) {
        std::size_t g = pick(rng, std::array<double, 2>{2.0 / 3.0, 1.0 / 3.0});
        std::size_t a = pick(rng, std::array<double, 3>{0.3, 0.4, 0.3});
        std::size_t e = pick(rng, education_probs[g * 3 + a]);
        bool married = rng.uniform01() < married_rate[e];
        std::size_t i = pick(rng, std::array<double, 3>{0.25, 0.5, 0.25});
        double s = 2000.0 + 500.0 * static_cast<double>(e) + 100.0 * static_cast<double>(i) +
                   rng.uniform(0.0, 22000.0);

        gender.cat.push_back(genders[g]);
        age.cat.push_back(ages[a]);
        education.cat.push_back(educations[e]);
        marital.cat.push_back(married ? "married" : "single");
        intelligence.cat.push_back(intelligences[i]);
        salary.num.push_back(s);
        loan.cat.push_back(s + (g == 0 ? 3000.0 : 0.0) > 19000.0 ? "yes" : "no");
    }

    Dataset ds;
    ds.add_column(std::move(gender));
    ds.add_column(std::move(age));
    ds.add_column(std::move(education));
    ds.add_column(std::move(marital));
    ds.add_column(std::move(intelligence));
    ds.add_column(std::move(salary));
    ds.add_column(std::move(loan));
    return ds;
}

} // namespace synthwright
