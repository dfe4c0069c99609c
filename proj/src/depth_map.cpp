#include "nlos/depth_map.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "nlos/common.hpp"

namespace nlos {

DepthMap::DepthMap(int width, int height, float fill)
    : width_(width), height_(height),
      values_(static_cast<size_t>(width) * height, fill) {
    validate();
}

DepthMap::DepthMap(int width, int height, std::vector<float> values)
    : width_(width), height_(height), values_(std::move(values)) {
    if (values_.size() != static_cast<size_t>(width_) * height_) {
        throw InputError("DepthMap: value count does not match dimensions");
    }
    validate();
}

void DepthMap::validate() const {
    if (width_ < 0 || height_ < 0) throw InputError("DepthMap: negative dimensions");
    for (float v : values_) {
        if (!std::isfinite(v) || v < -1.0f || v > 1.0f) {
            throw InputError("DepthMap: value outside [-1, 1]");
        }
    }
}

void save_depth_map(const DepthMap& map, const std::string& path) {
    nlohmann::json header;
    header["width"] = map.width();
    header["height"] = map.height();
    header["dtype"] = "f32le";
    std::ofstream hdr(path + ".json");
    if (!hdr) throw IoError("save_depth_map: cannot open " + path + ".json");
    hdr << header.dump(2) << "\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("save_depth_map: cannot open " + path);
    out.write(reinterpret_cast<const char*>(map.values().data()),
              static_cast<std::streamsize>(map.size() * sizeof(float)));
    if (!out) throw IoError("save_depth_map: write failed for " + path);
}

DepthMap load_depth_map(const std::string& path) {
    std::ifstream hdr(path + ".json");
    if (!hdr) throw IoError("load_depth_map: missing sidecar " + path + ".json");
    nlohmann::json header;
    hdr >> header;
    const int w = header.at("width").get<int>();
    const int h = header.at("height").get<int>();
    if (header.at("dtype").get<std::string>() != "f32le") {
        throw IoError("load_depth_map: unsupported dtype in " + path + ".json");
    }
    std::vector<float> values(static_cast<size_t>(w) * h);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_depth_map: cannot open " + path);
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(float)));
    if (!in) throw IoError("load_depth_map: truncated payload in " + path);
    return DepthMap(w, h, std::move(values));
}

void save_depth_pfm(const DepthMap& map, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("save_depth_pfm: cannot open " + path);
    // Negative scale marks little-endian; PFM rows run bottom to top.
    out << "Pf\n" << map.width() << " " << map.height() << "\n-1.0\n";
    for (int y = map.height() - 1; y >= 0; --y) {
        out.write(reinterpret_cast<const char*>(map.values().data() +
                                                static_cast<size_t>(y) * map.width()),
                  static_cast<std::streamsize>(map.width() * sizeof(float)));
    }
    if (!out) throw IoError("save_depth_pfm: write failed for " + path);
}

void save_depth_pgm(const DepthMap& map, const std::string& path) {
    Image img(map.width(), map.height());
    img.values.assign(map.values().begin(), map.values().end());
    save_pgm(img, path, -1.0f, 1.0f);
}

} // namespace nlos
