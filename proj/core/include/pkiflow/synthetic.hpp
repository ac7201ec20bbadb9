#ifndef PKIFLOW_SYNTHETIC_HPP
#define PKIFLOW_SYNTHETIC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pkiflow/dataset.hpp"

namespace pkiflow {

// Desk-scale generator for a flow-classification workload: every class is a
// Gaussian mixture over a few latent clusters whose centers sit at
// `separation` times a random unit direction.
//
// In latent-cluster mode the first two classes share one set of
// `latent_clusters` centers and differ only conditionally on the cluster:
// cluster l displaces the two classes by +/- `latent_offset` along feature
// (l / 2) % n_features, with the sign alternating per cluster so the
// marginal distribution of that feature carries no class signal. A depth-
// capped tree then has to identify the latent cluster before the offset
// feature is usable, which is exactly the information a cluster-label
// column hands it.
struct SyntheticSpec {
    std::vector<std::string> class_names;
    std::vector<size_t> train_counts;
    std::vector<size_t> test_counts;
    size_t n_features = 10;
    size_t clusters_per_class = 2;
    size_t latent_clusters = 8;   // shared pair clusters in latent mode
    double separation = 6.0;
    double noise_sigma = 1.0;
    double latent_offset = 2.0;
    bool latent_cluster_mode = false;
    uint64_t seed = 0;

    // Six classes with the imbalance profile of a lab APT capture, scaled
    // to desk size (ceil(full count / 50), floor 10).
    static SyntheticSpec defaults();
    // Two balanced classes over shared latent clusters.
    static SyntheticSpec latent_pair(uint64_t seed, size_t per_class = 600);
};

struct SyntheticData {
    Dataset train;
    Dataset test;
};

// Deterministic per spec.seed; train and test share the cluster centers.
// Throws InvalidSpec.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

} // namespace pkiflow

#endif
