#include "msfilter/trajectory.hpp"

#include <cmath>
#include <stdexcept>

#include "msfilter/csv.hpp"
#include "msfilter/linalg.hpp"
#include "msfilter/rng.hpp"

namespace msf {

ObservationSeries generate_observations(const Trajectory& traj,
                                        const std::vector<int>& obs_indices,
                                        const MatrixXd& r_obs, int obs_stride,
                                        std::uint64_t seed) {
    if (traj.size() < 2) throw std::invalid_argument("generate_observations: trajectory too short");
    if (obs_stride < 1 || (traj.size() - 1) % obs_stride != 0)
        throw std::invalid_argument("generate_observations: obs_stride must divide trajectory length");
    const int m = static_cast<int>(obs_indices.size());
    if (r_obs.rows() != m || r_obs.cols() != m)
        throw std::invalid_argument("generate_observations: r_obs dimension mismatch");
    if ((r_obs - r_obs.transpose()).norm() > 1e-12 * (1.0 + r_obs.norm()))
        throw std::invalid_argument("generate_observations: r_obs not symmetric");
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(r_obs);
    if (es.eigenvalues().minCoeff() < -1e-12 * (1.0 + r_obs.norm()))
        throw std::invalid_argument("generate_observations: r_obs not positive semidefinite");
    MatrixXd noise_sqrt = sym_sqrt(r_obs);

    ObservationSeries out;
    out.obs_indices = obs_indices;
    out.r_obs = r_obs;
    RngStream rng(seed, "observation-noise");
    for (size_t k = obs_stride; k < traj.size(); k += obs_stride) {
        VectorXd z(m), xi(m);
        for (int i = 0; i < m; ++i) {
            z(i) = traj.states[k](obs_indices[i]);
            xi(i) = rng.normal();
        }
        out.times.push_back(traj.times[k]);
        out.values.push_back(z + noise_sqrt * xi);
    }
    return out;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path,
                          const std::vector<std::string>& state_names) {
    CsvWriter csv(path);
    csv.comment("schema: trajectory-v1");
    const int n = traj.states.empty() ? 0 : static_cast<int>(traj.states[0].size());
    std::vector<std::string> names = {"t"};
    for (int i = 0; i < n; ++i)
        names.push_back(i < static_cast<int>(state_names.size()) ? state_names[i]
                                                                 : "x_" + std::to_string(i));
    csv.header(names);
    for (size_t k = 0; k < traj.size(); ++k) {
        std::vector<double> row = {traj.times[k]};
        for (int i = 0; i < n; ++i) row.push_back(traj.states[k](i));
        csv.row(row);
    }
    write_metadata(path + ".meta", {{"seed", std::to_string(traj.seed)}});
}

void write_observations_csv(const ObservationSeries& obs, const std::string& path) {
    CsvWriter csv(path);
    csv.comment("schema: observations-v1");
    const int m = obs.values.empty() ? 0 : static_cast<int>(obs.values[0].size());
    std::vector<std::string> names = {"t"};
    for (int i = 0; i < m; ++i) names.push_back("z_" + std::to_string(i));
    csv.header(names);
    for (size_t k = 0; k < obs.size(); ++k) {
        std::vector<double> row = {obs.times[k]};
        for (int i = 0; i < m; ++i) row.push_back(obs.values[k](i));
        csv.row(row);
    }
}

}  // namespace msf
