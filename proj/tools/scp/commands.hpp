#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "scp/descriptor.hpp"
#include "scp/keypoints.hpp"
#include "scp/synthetic.hpp"

namespace scp::cli {

namespace fs = std::filesystem;

/// Process exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitIo = 2,
    kExitMissing = 3,
    kExitUsage = 64,
};

struct CommonOptions {
    fs::path manifest;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

/// Job count from --jobs, else the SCP_JOBS environment variable, else 1.
unsigned resolve_jobs(std::optional<unsigned> flag);

struct Streams {
    std::ostream& out;
    std::ostream& err;
};

int cmd_extract(const CommonOptions& common, const DescriptorConfig& config, const fs::path& out_dir,
                Streams io);

struct KeypointOptions {
    Detector detector = Detector::dog_sift;
    int k = kDefaultKeypoints;
    double min_dist = kDefaultMinDistance;
    fs::path out_dir;
};
int cmd_keypoints(const CommonOptions& common, const KeypointOptions& opts, Streams io);

struct SelectOptions {
    std::size_t m = 1;
    std::size_t budget = 10000;
    fs::path report;
};
int cmd_select(const CommonOptions& common, const SelectOptions& opts, Streams io);

struct EvaluateOptions {
    std::vector<std::string> templates;
    std::vector<double> radii_mm{2.0, 2.5, 3.0, 4.0};
    fs::path report;
};
int cmd_evaluate(const CommonOptions& common, const EvaluateOptions& opts, Streams io);

struct BenchOptions {
    SyntheticDatasetSpec spec;
    DescriptorConfig descriptor;
    int k = kDefaultKeypoints;
    double min_dist = kDefaultMinDistance;
    std::size_t m = 1;
    std::size_t budget = 10000;
    std::size_t random_trials = 200;
    std::optional<fs::path> out;
    std::optional<fs::path> write_dataset;
};
int cmd_bench(const CommonOptions& common, const BenchOptions& opts, Streams io);

/// Parses argv and dispatches. Returns the process exit code.
int run(int argc, char** argv, Streams io);

}  // namespace scp::cli
