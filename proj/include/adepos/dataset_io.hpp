#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "adepos/signal_features.hpp"

namespace adepos {

// One vibration test campaign: a directory of whitespace-delimited ASCII
// snapshot files, 20480 rows each, one column per accelerometer channel.
// Filenames are timestamps, so lexicographic order is chronological.
struct ImsFileSet {
    std::vector<std::filesystem::path> files; // sorted by filename
    int channels = 0;
    static constexpr int kRowsPerFile = 20480;
};

// Which file column(s) feed each bearing. With two channels per bearing,
// either the first channel is taken or the pair is averaged.
struct ChannelMapping {
    std::vector<std::vector<int>> channels_per_bearing;
    bool average_pairs = false;

    // column i -> bearing i
    static ChannelMapping identity(int bearings);
    // bearing i -> columns (2i, 2i+1)
    static ChannelMapping paired(int bearings, bool average);
};

struct BearingStream {
    std::string id;
    std::vector<Window> windows; // one per file, kRowsPerFile samples each
};

// Enumerate the snapshot files of a campaign directory, sorted by filename.
ImsFileSet discover_ims_files(const std::filesystem::path& dir, int expected_channels);

// Parse one snapshot into a (20480 x channels) matrix. Wrong arity or a
// non-numeric token raises ParseError with the file and line; a row count
// other than 20480 raises ShapeError.
Eigen::MatrixXd load_ims_file(const std::filesystem::path& path, int expected_channels);

// One window per file per bearing, reduced per the mapping.
std::vector<BearingStream> bearing_streams(const ImsFileSet& fileset, const ChannelMapping& map);

// Feature CSV: header rms,kurtosis,peak_peak,crest_factor,skewness with an
// optional trailing label column.
struct FeatureCsv {
    std::vector<FeatureVector> features;
    std::vector<int> labels; // parallel to features when has_labels
    bool has_labels = false;
};

FeatureCsv load_feature_csv(const std::filesystem::path& path);
void write_feature_csv(const std::filesystem::path& path, const std::vector<FeatureVector>& rows,
                       const std::vector<int>* labels = nullptr);

} // namespace adepos
