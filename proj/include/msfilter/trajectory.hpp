#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace msf {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Trajectory {
    std::vector<double> times;
    std::vector<VectorXd> states;
    std::uint64_t seed = 0;

    size_t size() const { return times.size(); }
};

struct ObservationSeries {
    std::vector<double> times;
    std::vector<VectorXd> values;
    std::vector<int> obs_indices;
    MatrixXd r_obs;

    size_t size() const { return times.size(); }
};

// Observes the selected state components at every obs_stride-th trajectory
// point (excluding the initial time) and perturbs them with correlated
// Gaussian noise of covariance r_obs. r_obs == 0 is allowed (exact
// observations); otherwise it must be symmetric PSD.
ObservationSeries generate_observations(const Trajectory& traj,
                                        const std::vector<int>& obs_indices,
                                        const MatrixXd& r_obs, int obs_stride,
                                        std::uint64_t seed);

void write_trajectory_csv(const Trajectory& traj, const std::string& path,
                          const std::vector<std::string>& state_names = {});
void write_observations_csv(const ObservationSeries& obs, const std::string& path);

}  // namespace msf
