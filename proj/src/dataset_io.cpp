#include "adepos/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "adepos/errors.hpp"

namespace adepos {

namespace fs = std::filesystem;

ChannelMapping ChannelMapping::identity(int bearings) {
    ChannelMapping m;
    for (int i = 0; i < bearings; ++i) m.channels_per_bearing.push_back({i});
    return m;
}

ChannelMapping ChannelMapping::paired(int bearings, bool average) {
    ChannelMapping m;
    m.average_pairs = average;
    for (int i = 0; i < bearings; ++i) m.channels_per_bearing.push_back({2 * i, 2 * i + 1});
    return m;
}

ImsFileSet discover_ims_files(const fs::path& dir, int expected_channels) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    ImsFileSet set;
    set.channels = expected_channels;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file()) set.files.push_back(entry.path());
    std::sort(set.files.begin(), set.files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
    return set;
}

Eigen::MatrixXd load_ims_file(const fs::path& path, int expected_channels) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    Eigen::MatrixXd m(ImsFileSet::kRowsPerFile, expected_channels);
    std::string line;
    std::size_t row = 0;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (row >= static_cast<std::size_t>(ImsFileSet::kRowsPerFile))
            throw ShapeError(path.string() + ": more than " +
                             std::to_string(ImsFileSet::kRowsPerFile) + " rows");

        const char* p = line.data();
        const char* end = p + line.size();
        for (int c = 0; c < expected_channels; ++c) {
            while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
            if (p >= end) throw ParseError(path.string(), line_no, "row has too few columns");
            double value = 0.0;
            const auto res = std::from_chars(p, end, value);
            if (res.ec != std::errc{})
                throw ParseError(path.string(), line_no, "non-numeric token");
            m(static_cast<Eigen::Index>(row), c) = value;
            p = res.ptr;
        }
        while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
        if (p < end) throw ParseError(path.string(), line_no, "row has too many columns");
        ++row;
    }
    if (row != static_cast<std::size_t>(ImsFileSet::kRowsPerFile))
        throw ShapeError(path.string() + ": expected " +
                         std::to_string(ImsFileSet::kRowsPerFile) + " rows, got " +
                         std::to_string(row));
    return m;
}

std::vector<BearingStream> bearing_streams(const ImsFileSet& fileset, const ChannelMapping& map) {
    for (const auto& cols : map.channels_per_bearing) {
        if (cols.empty()) throw MappingError("bearing with no channels");
        for (int c : cols)
            if (c < 0 || c >= fileset.channels)
                throw MappingError("mapping references column " + std::to_string(c) + " of a " +
                                   std::to_string(fileset.channels) + "-column set");
    }

    std::vector<BearingStream> streams(map.channels_per_bearing.size());
    for (std::size_t b = 0; b < streams.size(); ++b)
        streams[b].id = "bearing" + std::to_string(b + 1);

    for (const auto& file : fileset.files) {
        const Eigen::MatrixXd m = load_ims_file(file, fileset.channels);
        for (std::size_t b = 0; b < streams.size(); ++b) {
            const auto& cols = map.channels_per_bearing[b];
            Window w(static_cast<std::size_t>(m.rows()));
            if (cols.size() > 1 && map.average_pairs) {
                for (Eigen::Index r = 0; r < m.rows(); ++r) {
                    double acc = 0.0;
                    for (int c : cols) acc += m(r, c);
                    w[static_cast<std::size_t>(r)] = acc / static_cast<double>(cols.size());
                }
            } else {
                for (Eigen::Index r = 0; r < m.rows(); ++r)
                    w[static_cast<std::size_t>(r)] = m(r, cols.front());
            }
            streams[b].windows.push_back(std::move(w));
        }
    }
    return streams;
}

FeatureCsv load_feature_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string(), 1, "missing header row");

    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            while (!tok.empty() && (tok.back() == '\r' || tok.back() == ' ')) tok.pop_back();
            std::size_t start = 0;
            while (start < tok.size() && tok[start] == ' ') ++start;
            out.push_back(tok.substr(start));
        }
        return out;
    };

    const auto header = split(line);
    std::array<int, kFeatureDim> col_of{};
    for (int f = 0; f < kFeatureDim; ++f) {
        const auto it = std::find(header.begin(), header.end(), std::string(kFeatureNames[f]));
        if (it == header.end())
            throw MissingColumn(path.string() + ": missing column '" +
                                std::string(kFeatureNames[f]) + "'");
        col_of[f] = static_cast<int>(it - header.begin());
    }
    int label_col = -1;
    const auto lit = std::find(header.begin(), header.end(), "label");
    if (lit != header.end()) label_col = static_cast<int>(lit - header.begin());

    FeatureCsv csv;
    csv.has_labels = label_col >= 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size())
            throw ParseError(path.string(), line_no, "row arity does not match header");

        std::array<double, kFeatureDim> vals{};
        for (int f = 0; f < kFeatureDim; ++f) {
            const std::string& cell = cells[static_cast<std::size_t>(col_of[f])];
            double v = 0.0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
                throw ParseError(path.string(), line_no, "non-numeric value '" + cell + "'");
            vals[f] = v;
        }
        csv.features.push_back(FeatureVector::from_array(vals));
        if (csv.has_labels) {
            const std::string& cell = cells[static_cast<std::size_t>(label_col)];
            int v = 0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
                throw ParseError(path.string(), line_no, "non-integer label '" + cell + "'");
            csv.labels.push_back(v);
        }
    }
    return csv;
}

void write_feature_csv(const fs::path& path, const std::vector<FeatureVector>& rows,
                       const std::vector<int>* labels) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out.precision(17);
    for (int f = 0; f < kFeatureDim; ++f) out << (f ? "," : "") << kFeatureNames[f];
    if (labels) out << ",label";
    out << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto a = rows[i].as_array();
        for (int f = 0; f < kFeatureDim; ++f) out << (f ? "," : "") << a[static_cast<std::size_t>(f)];
        if (labels) out << ',' << (*labels)[i];
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

} // namespace adepos
