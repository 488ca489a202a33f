#include "reefscale/raster.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace reefscale {

namespace {

// Reads the next whitespace-separated token, skipping '#' comments.
std::string next_header_token(std::istream &in) {
    std::string tok;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') {
                c = in.get();
            }
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    return tok;
}

int parse_header_int(std::istream &in, const std::string &what,
                     const std::filesystem::path &path) {
    const std::string tok = next_header_token(in);
    int value = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || value <= 0) {
        throw DataError(path.string() + ": bad " + what + " in raster header: '" + tok + "'");
    }
    return value;
}

} // namespace

Raster read_raster(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open raster file: " + path.string());
    }
    const std::string magic = next_header_token(in);
    int channels = 0;
    if (magic == "P5") {
        channels = 1;
    } else if (magic == "P6") {
        channels = 3;
    } else {
        throw DataError(path.string() + ": unsupported raster magic '" + magic +
                        "' (expected binary P5 or P6)");
    }
    Raster raster;
    raster.channels = channels;
    raster.width = parse_header_int(in, "width", path);
    raster.height = parse_header_int(in, "height", path);
    const int maxval = parse_header_int(in, "maxval", path);
    if (maxval != 255) {
        throw DataError(path.string() + ": only maxval 255 is supported, got " +
                        std::to_string(maxval));
    }
    // Exactly one whitespace byte separates the header from the pixel data;
    // next_header_token already consumed it.
    const size_t n = static_cast<size_t>(raster.width) * raster.height * channels;
    raster.data.resize(n);
    in.read(reinterpret_cast<char *>(raster.data.data()), static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in.gcount()) != n) {
        throw DataError(path.string() + ": truncated raster data (expected " +
                        std::to_string(n) + " bytes)");
    }
    return raster;
}

void write_raster(const std::filesystem::path &path, const Raster &raster) {
    if (raster.channels != 1 && raster.channels != 3) {
        throw DataError("write_raster: only 1- or 3-channel rasters are supported");
    }
    if (raster.width <= 0 || raster.height <= 0) {
        throw DataError("write_raster: raster has no pixels");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot open raster file for writing: " + path.string());
    }
    out << (raster.channels == 1 ? "P5" : "P6") << "\n"
        << raster.width << " " << raster.height << "\n255\n";
    out.write(reinterpret_cast<const char *>(raster.data.data()),
              static_cast<std::streamsize>(raster.data.size()));
    if (!out) {
        throw DataError("failed writing raster file: " + path.string());
    }
}

WorldFile read_world_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open world file: " + path.string());
    }
    WorldFile wf;
    double *fields[6] = {&wf.x_scale, &wf.y_rot, &wf.x_rot,
                         &wf.y_scale, &wf.x_center_ul, &wf.y_center_ul};
    for (int i = 0; i < 6; ++i) {
        if (!(in >> *fields[i])) {
            throw DataError(path.string() + ": world file needs 6 numeric lines, failed at line " +
                            std::to_string(i + 1));
        }
    }
    return wf;
}

void write_world_file(const std::filesystem::path &path, const WorldFile &wf) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot open world file for writing: " + path.string());
    }
    out.precision(17);
    out << wf.x_scale << "\n" << wf.y_rot << "\n" << wf.x_rot << "\n"
        << wf.y_scale << "\n" << wf.x_center_ul << "\n" << wf.y_center_ul << "\n";
}

std::string read_crs_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open CRS file: " + path.string());
    }
    std::string line;
    std::getline(in, line);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
        line.pop_back();
    }
    if (line.empty()) {
        throw DataError(path.string() + ": CRS declaration is empty");
    }
    return line;
}

void write_crs_file(const std::filesystem::path &path, const std::string &crs_id) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot open CRS file for writing: " + path.string());
    }
    out << crs_id << "\n";
}

} // namespace reefscale
