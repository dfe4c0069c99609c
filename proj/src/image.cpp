#include "nlos/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "nlos/common.hpp"

namespace nlos {

void save_pgm(const Image& img, const std::string& path, float lo, float hi) {
    if (img.empty()) throw InputError("save_pgm: empty image");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("save_pgm: cannot open " + path);
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    const float span = hi > lo ? hi - lo : 1.0f;
    std::vector<std::uint8_t> row(img.width);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            float t = (img.at(x, y) - lo) / span;
            t = std::clamp(t, 0.0f, 1.0f);
            row[x] = static_cast<std::uint8_t>(std::lround(t * 255.0f));
        }
        out.write(reinterpret_cast<const char*>(row.data()), row.size());
    }
    if (!out) throw IoError("save_pgm: write failed for " + path);
}

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
        } else if (!std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            while ((c = in.peek()) != EOF && !std::isspace(c)) {
                tok.push_back(static_cast<char>(in.get()));
            }
            return tok;
        }
    }
    return tok;
}

} // namespace

Image load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_pgm: cannot open " + path);
    const std::string magic = next_token(in);
    if (magic != "P2" && magic != "P5") {
        throw IoError("load_pgm: unsupported magic '" + magic + "' in " + path);
    }
    const int w = std::stoi(next_token(in));
    const int h = std::stoi(next_token(in));
    const int maxval = std::stoi(next_token(in));
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) {
        throw IoError("load_pgm: bad header in " + path);
    }
    Image img(w, h);
    if (magic == "P2") {
        for (auto& v : img.values) v = static_cast<float>(std::stol(next_token(in)));
        return img;
    }
    in.get(); // single whitespace after maxval
    const size_t n = img.values.size();
    if (maxval < 256) {
        std::vector<std::uint8_t> buf(n);
        in.read(reinterpret_cast<char*>(buf.data()), buf.size());
        if (!in) throw IoError("load_pgm: truncated payload in " + path);
        for (size_t i = 0; i < n; ++i) img.values[i] = buf[i];
    } else {
        std::vector<std::uint8_t> buf(n * 2); // 16-bit PGM payloads are big-endian
        in.read(reinterpret_cast<char*>(buf.data()), buf.size());
        if (!in) throw IoError("load_pgm: truncated payload in " + path);
        for (size_t i = 0; i < n; ++i) {
            img.values[i] = static_cast<float>((buf[2 * i] << 8) | buf[2 * i + 1]);
        }
    }
    return img;
}

} // namespace nlos
