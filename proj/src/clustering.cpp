#include "trustsc/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>
#include <stdexcept>

#include "trustsc/rng.hpp"

namespace trustsc {

namespace {

double sq_dist(const Location& a, const Location& b) {
    double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

int nearest_center(const Location& p, const std::vector<Location>& centers) {
    int best = 0;
    double best_d = sq_dist(p, centers[0]);
    for (int i = 1; i < static_cast<int>(centers.size()); ++i) {
        double d = sq_dist(p, centers[i]);
        if (d < best_d) {  // ties keep the lower index
            best_d = d;
            best = i;
        }
    }
    return best;
}

ClusteringResult lloyd(const std::vector<Task>& tasks, std::vector<Location> centers) {
    const int k = static_cast<int>(centers.size());
    const int n = static_cast<int>(tasks.size());
    std::vector<int> assign(n, -1);
    ClusteringResult result;

    for (int pass = 0; pass < kMaxClusterPasses; ++pass) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int c = nearest_center(tasks[i].location, centers);
            if (c != assign[i]) {
                assign[i] = c;
                changed = true;
            }
        }
        result.iterations = pass + 1;

        // centroid update with empty-cluster rescue
        std::vector<double> sx(k, 0.0), sy(k, 0.0);
        std::vector<int> count(k, 0);
        for (int i = 0; i < n; ++i) {
            sx[assign[i]] += tasks[i].location.x;
            sy[assign[i]] += tasks[i].location.y;
            ++count[assign[i]];
        }
        for (int c = 0; c < k; ++c) {
            if (count[c] > 0) {
                centers[c] = {sx[c] / count[c], sy[c] / count[c]};
            } else {
                // reseed to the task farthest from its current nearest center
                int far_i = 0;
                double far_d = -1.0;
                for (int i = 0; i < n; ++i) {
                    double d = sq_dist(tasks[i].location, centers[nearest_center(tasks[i].location, centers)]);
                    if (d > far_d) {
                        far_d = d;
                        far_i = i;
                    }
                }
                centers[c] = tasks[far_i].location;
                assign[far_i] = c;
                changed = true;
            }
        }

        double wcss = 0.0;
        for (int i = 0; i < n; ++i) wcss += sq_dist(tasks[i].location, centers[assign[i]]);
        result.wcss_trace.push_back(wcss);

        if (!changed) break;
    }

    result.clusters.resize(k);
    for (int c = 0; c < k; ++c) result.clusters[c].center = centers[c];
    for (int i = 0; i < n; ++i) result.clusters[assign[i]].task_ids.push_back(tasks[i].id);
    return result;
}

}  // namespace

ClusteringResult form_clusters(const std::vector<Task>& tasks,
                               std::vector<Location> initial_centers) {
    if (initial_centers.empty()) throw std::invalid_argument("k must be at least 1");
    if (tasks.empty()) throw std::invalid_argument("no tasks to cluster");
    return lloyd(tasks, std::move(initial_centers));
}

ClusteringResult form_clusters(const std::vector<Task>& tasks, int k, std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    // distinct locations, so initial centers never coincide
    std::vector<Location> distinct;
    for (const Task& t : tasks) {
        bool dup = false;
        for (const Location& l : distinct)
            dup = dup || (l.x == t.location.x && l.y == t.location.y);
        if (!dup) distinct.push_back(t.location);
    }
    if (k > static_cast<int>(distinct.size()))
        throw std::invalid_argument("k exceeds the number of distinct task locations");
    Rng rng(derive_seed(seed, "cluster-init"));
    std::vector<std::size_t> idx(distinct.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    rng.shuffle(idx);
    std::vector<Location> centers;
    centers.reserve(k);
    for (int i = 0; i < k; ++i) centers.push_back(distinct[idx[i]]);
    return lloyd(tasks, std::move(centers));
}

void attach_executors(std::vector<Cluster>& clusters, const std::vector<Executor>& executors) {
    if (clusters.empty()) throw std::invalid_argument("no clusters to attach to");
    std::vector<Location> centers;
    centers.reserve(clusters.size());
    for (const Cluster& c : clusters) centers.push_back(c.center);
    for (const Executor& e : executors)
        clusters[nearest_center(e.location, centers)].executor_ids.push_back(e.id);
}

double intra_cluster_distance(const Cluster& c, const Scenario& s) {
    if (c.task_ids.empty()) throw std::domain_error("intra-cluster distance of an empty cluster");
    double sum = 0.0;
    for (TaskId tid : c.task_ids) sum += distance(s.task(tid).location, c.center);
    return sum / static_cast<double>(c.task_ids.size());
}

void write_cluster_csv(std::ostream& out, const std::vector<Cluster>& clusters) {
    out << "cluster_id,center_x,center_y,task_id,executor_id\n";
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        for (TaskId tid : clusters[c].task_ids)
            out << c << ',' << clusters[c].center.x << ',' << clusters[c].center.y << ','
                << tid << ",\n";
        for (AgentId eid : clusters[c].executor_ids)
            out << c << ',' << clusters[c].center.x << ',' << clusters[c].center.y << ",,"
                << eid << '\n';
    }
}

}  // namespace trustsc
