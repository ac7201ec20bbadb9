#include "pkiflow/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "pkiflow/rng.hpp"

namespace pkiflow {

namespace {

// ceil(full / 50), floor 10
size_t desk_scale(size_t full_count) {
    size_t scaled = (full_count + 49) / 50;
    return std::max<size_t>(scaled, 10);
}

std::vector<double> random_unit_vector(Rng& rng, size_t d) {
    std::vector<double> v(d);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (size_t j = 0; j < d; ++j) {
            v[j] = rng.next_normal();
            norm += v[j] * v[j];
        }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (size_t j = 0; j < d; ++j) v[j] /= norm;
    return v;
}

struct ClusterRecipe {
    std::vector<double> center;
    int offset_feature = -1; // latent pair only
    double offset_sign = 0.0;
};

} // namespace

SyntheticSpec SyntheticSpec::defaults() {
    SyntheticSpec spec;
    spec.class_names = {"DE", "IC", "LM", "NT", "P", "R"};
    const size_t full_train[] = {527, 73, 729, 254836, 2122, 833};
    const size_t full_test[] = {74, 77, 142, 55583, 360, 251};
    for (size_t c = 0; c < 6; ++c) {
        spec.train_counts.push_back(desk_scale(full_train[c]));
        spec.test_counts.push_back(desk_scale(full_test[c]));
    }
    return spec;
}

SyntheticSpec SyntheticSpec::latent_pair(uint64_t seed, size_t per_class) {
    SyntheticSpec spec;
    spec.class_names = {"A", "B"};
    spec.train_counts = {per_class, per_class};
    spec.test_counts = {per_class / 4, per_class / 4};
    spec.latent_cluster_mode = true;
    spec.seed = seed;
    return spec;
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    size_t m = spec.class_names.size();
    if (m < 2) throw InvalidSpec("need at least 2 classes");
    if (spec.train_counts.size() != m || spec.test_counts.size() != m)
        throw InvalidSpec("class_names and counts disagree");
    size_t positive = 0;
    for (size_t c : spec.train_counts) positive += c > 0 ? 1 : 0;
    if (positive < 2) throw InvalidSpec("need positive training counts for at least 2 classes");
    if (spec.n_features == 0 || spec.clusters_per_class == 0)
        throw InvalidSpec("n_features and clusters_per_class must be positive");
    if (spec.latent_cluster_mode && spec.latent_clusters < 2)
        throw InvalidSpec("latent mode needs latent_clusters >= 2");

    size_t d = spec.n_features;
    Rng rng(spec.seed);

    // Cluster recipes per class, shared by train and test.
    std::vector<std::vector<ClusterRecipe>> recipes(m);
    if (spec.latent_cluster_mode) {
        // first two classes share centers and differ by a per-cluster offset
        std::vector<ClusterRecipe> shared(spec.latent_clusters);
        for (size_t l = 0; l < spec.latent_clusters; ++l) {
            std::vector<double> dir = random_unit_vector(rng, d);
            shared[l].center.resize(d);
            for (size_t j = 0; j < d; ++j) shared[l].center[j] = spec.separation * dir[j];
            shared[l].offset_feature = static_cast<int>((l / 2) % d);
            shared[l].offset_sign = (l % 2 == 0) ? 1.0 : -1.0;
        }
        recipes[0] = shared;
        recipes[1] = shared;
        for (size_t c = 2; c < m; ++c) {
            for (size_t l = 0; l < spec.clusters_per_class; ++l) {
                ClusterRecipe r;
                std::vector<double> dir = random_unit_vector(rng, d);
                r.center.resize(d);
                for (size_t j = 0; j < d; ++j) r.center[j] = spec.separation * dir[j];
                recipes[c].push_back(std::move(r));
            }
        }
    } else {
        for (size_t c = 0; c < m; ++c) {
            for (size_t l = 0; l < spec.clusters_per_class; ++l) {
                ClusterRecipe r;
                std::vector<double> dir = random_unit_vector(rng, d);
                r.center.resize(d);
                for (size_t j = 0; j < d; ++j) r.center[j] = spec.separation * dir[j];
                recipes[c].push_back(std::move(r));
            }
        }
    }

    auto draw_split = [&](const std::vector<size_t>& counts) {
        size_t n = 0;
        for (size_t c : counts) n += c;
        Dataset ds;
        ds.x = Matrix(n, d);
        ds.y.reserve(n);
        ds.class_index.names = spec.class_names;
        for (size_t j = 0; j < d; ++j) ds.feature_names.push_back("f" + std::to_string(j));
        size_t row = 0;
        for (size_t c = 0; c < m; ++c) {
            const auto& class_recipes = recipes[c];
            for (size_t i = 0; i < counts[c]; ++i) {
                const ClusterRecipe& r = class_recipes[rng.next_index(class_recipes.size())];
                double* dst = ds.x.row_ptr(row);
                for (size_t j = 0; j < d; ++j)
                    dst[j] = r.center[j] + spec.noise_sigma * rng.next_normal();
                if (r.offset_feature >= 0) {
                    // class 0 gets +sign * offset, class 1 the mirror
                    double direction = c == 0 ? 1.0 : -1.0;
                    dst[r.offset_feature] += direction * r.offset_sign * spec.latent_offset;
                }
                ds.y.push_back(static_cast<int>(c));
                ++row;
            }
        }
        return ds;
    };

    SyntheticData out;
    out.train = draw_split(spec.train_counts);
    out.test = draw_split(spec.test_counts);
    return out;
}

} // namespace pkiflow
