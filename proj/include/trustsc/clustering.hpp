#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "trustsc/model.hpp"

namespace trustsc {

struct Cluster {
    Location center;
    std::vector<TaskId> task_ids;
    std::vector<AgentId> executor_ids;
};

struct ClusteringResult {
    std::vector<Cluster> clusters;
    int iterations = 0;              // assignment passes until stable
    std::vector<double> wcss_trace;  // within-cluster sum of squares after each pass
};

// Lloyd iteration over task locations. Initial centers are k distinct task
// locations sampled without replacement; assignment ties go to the lowest
// cluster index; an emptied cluster is reseeded to the task farthest from
// its nearest center. Stops when an assignment pass changes nothing or
// after kMaxClusterPasses passes.
inline constexpr int kMaxClusterPasses = 1000;

ClusteringResult form_clusters(const std::vector<Task>& tasks, int k, std::uint64_t seed);

// Same iteration from caller-pinned initial centers.
ClusteringResult form_clusters(const std::vector<Task>& tasks,
                               std::vector<Location> initial_centers);

// Each executor joins the cluster with the nearest centroid (ties to the
// lowest cluster index).
void attach_executors(std::vector<Cluster>& clusters, const std::vector<Executor>& executors);

// Mean member distance to the centroid; throws std::domain_error on an
// empty cluster.
double intra_cluster_distance(const Cluster& c, const Scenario& s);

// One row per membership: cluster_id, center_x, center_y, task_id, executor_id.
void write_cluster_csv(std::ostream& out, const std::vector<Cluster>& clusters);

}  // namespace trustsc
