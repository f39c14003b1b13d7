#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "skelplan/pipeline.hpp"
#include "skelplan/planners.hpp"

namespace skelplan {

// ---------------------------------------------------------------------------
// Graph size versus resolution and noise

struct StabilityOptions {
  std::vector<double> voxel_sizes{0.10, 0.15, 0.25};
  std::vector<double> sigmas{0.0, 0.1, 0.2};
  bool include_ground_truth = true;
  double ground_truth_voxel_size = 0.10;
};

struct StabilityRow {
  std::string name;
  double voxel_size = 0.0;
  double sigma = 0.0;
  bool ground_truth = false;
  std::size_t gvd_voxels = 0;
  std::size_t diagram_voxels = 0;
  std::size_t vertices = 0;
  std::size_t edges = 0;
  double build_s = 0.0;

  std::size_t graph_size() const { return vertices + edges; }
};

struct StabilitySummary {
  /// Per noise level: diagram count at the finest over the coarsest voxel size.
  std::map<double, double> diagram_ratio;
  /// Largest over smallest vertex+edge count across all rows.
  double graph_ratio = 0.0;
  double total_s = 0.0;
};

std::vector<StabilityRow> run_stability(const PrimitiveWorld& world, const StabilityOptions& options,
                                        const PipelineConfig& base);
StabilitySummary summarize_stability(const std::vector<StabilityRow>& rows);
void write_stability_csv(std::ostream& out, const std::vector<StabilityRow>& rows);

// ---------------------------------------------------------------------------
// Maze planning benchmark

struct MazeBenchOptions {
  MazeSpec maze{15.0, 1.5, 1.4, 0.2, 1};
  double voxel_size = 0.1;
  /// Map from simulated coverage scans instead of exact distances.
  bool scanned_map = false;
  std::size_t query_pairs = 10;
  std::size_t seeds = 10;
  std::uint64_t query_seed = 7;
  double robot_radius = 0.3;
  double rrt_connect_time_limit = 10.0;
  double rrt_star_time_limit = 2.0;
  RrtConfig rrt;
};

struct BenchRecord {
  std::string planner;
  double time_s = 0.0;
  double path_length_m = 0.0;
  std::size_t solution_vertices = 0;
  bool success = false;
  std::uint64_t seed = 0;
  std::string map_id;
};

struct Query {
  Point start;
  Point goal;
};

/// Pairs of distinct maze cell centers, at least half the maze side apart.
std::vector<Query> maze_queries(const MazeSpec& spec, std::size_t count, std::uint64_t seed);

struct MazeBenchResult {
  std::vector<BenchRecord> records;
  std::map<std::string, double> median_time;
  std::map<std::string, double> median_length;
  /// Successful outputs that failed the clearance sampling audit.
  std::size_t audit_failures = 0;
  std::size_t graph_vertices = 0;
  std::size_t graph_edges = 0;
  std::vector<StageTiming> build_timings;
};

MazeBenchResult run_maze_bench(const MazeBenchOptions& options);
void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records);

double median(std::vector<double> values);

}  // namespace skelplan
