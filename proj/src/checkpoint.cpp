#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "nlos/common.hpp"
#include "nlos/train.hpp"

namespace nlos {

namespace {

constexpr char kMagic[] = "NLOSCKPT1\n";
constexpr size_t kMagicLen = sizeof(kMagic) - 1;

nlohmann::json config_to_json(const ArchitectureConfig& cfg) {
    nlohmann::json j;
    j["nx"] = cfg.nx;
    j["ny"] = cfg.ny;
    j["nt"] = cfg.nt;
    j["levels"] = cfg.levels;
    j["base_channels"] = cfg.base_channels;
    j["output_res"] = cfg.output_res;
    j["dense_layers"] = cfg.dense_layers;
    j["regressor_channels"] = cfg.regressor_channels;
    j["normalize_input"] = cfg.normalize_input;
    j["seed"] = cfg.seed;
    return j;
}

ArchitectureConfig config_from_json(const nlohmann::json& j) {
    ArchitectureConfig cfg;
    cfg.nx = j.at("nx").get<int>();
    cfg.ny = j.at("ny").get<int>();
    cfg.nt = j.at("nt").get<int>();
    cfg.levels = j.at("levels").get<int>();
    cfg.base_channels = j.at("base_channels").get<int>();
    cfg.output_res = j.at("output_res").get<int>();
    cfg.dense_layers = j.at("dense_layers").get<int>();
    cfg.regressor_channels = j.at("regressor_channels").get<int>();
    cfg.normalize_input = j.at("normalize_input").get<bool>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    return cfg;
}

nlohmann::json tensor_manifest(const std::vector<std::string>& names,
                               const std::vector<Tensor<float>>& tensors,
                               std::uint64_t& offset) {
    nlohmann::json list = nlohmann::json::array();
    for (size_t i = 0; i < tensors.size(); ++i) {
        nlohmann::json e;
        e["name"] = i < names.size() ? names[i] : "t" + std::to_string(i);
        e["shape"] = tensors[i].shape();
        e["offset"] = offset;
        offset += static_cast<std::uint64_t>(tensors[i].size()) * sizeof(float);
        list.push_back(e);
    }
    return list;
}

std::vector<Tensor<float>> read_tensors(std::ifstream& in, const nlohmann::json& manifest,
                                        std::uint64_t payload_start,
                                        std::vector<std::string>* names) {
    std::vector<Tensor<float>> tensors;
    for (const auto& e : manifest) {
        if (names) names->push_back(e.at("name").get<std::string>());
        Tensor<float> t(e.at("shape").get<std::vector<int>>());
        in.seekg(static_cast<std::streamoff>(payload_start + e.at("offset").get<std::uint64_t>()));
        in.read(reinterpret_cast<char*>(t.data()),
                static_cast<std::streamsize>(t.size() * sizeof(float)));
        if (!in) throw IoError("load_checkpoint: truncated tensor payload");
        tensors.push_back(std::move(t));
    }
    return tensors;
}

} // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    nlohmann::json header;
    header["config"] = config_to_json(ckpt.config);
    header["history"]["train_loss"] = ckpt.history.train_loss;
    header["history"]["val_loss"] = ckpt.history.val_loss;
    header["history"]["best_epoch"] = ckpt.history.best_epoch;
    header["adam_t"] = ckpt.adam_t;

    std::uint64_t offset = 0;
    header["params"] = tensor_manifest(ckpt.names, ckpt.params, offset);
    header["adam_m"] = tensor_manifest(ckpt.names, ckpt.adam_m, offset);
    header["adam_v"] = tensor_manifest(ckpt.names, ckpt.adam_v, offset);

    const std::string header_str = header.dump();
    const std::uint64_t header_size = header_str.size();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("save_checkpoint: cannot open " + path);
    out.write(kMagic, static_cast<std::streamsize>(kMagicLen));
    out.write(reinterpret_cast<const char*>(&header_size), sizeof(header_size));
    out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
    auto write_all = [&](const std::vector<Tensor<float>>& tensors) {
        for (const auto& t : tensors) {
            out.write(reinterpret_cast<const char*>(t.data()),
                      static_cast<std::streamsize>(t.size() * sizeof(float)));
        }
    };
    write_all(ckpt.params);
    write_all(ckpt.adam_m);
    write_all(ckpt.adam_v);
    if (!out) throw IoError("save_checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_checkpoint: cannot open " + path);
    char magic[kMagicLen];
    in.read(magic, static_cast<std::streamsize>(kMagicLen));
    if (!in || std::memcmp(magic, kMagic, kMagicLen) != 0) {
        throw IoError("load_checkpoint: bad magic in " + path);
    }
    std::uint64_t header_size = 0;
    in.read(reinterpret_cast<char*>(&header_size), sizeof(header_size));
    std::string header_str(header_size, '\0');
    in.read(header_str.data(), static_cast<std::streamsize>(header_size));
    if (!in) throw IoError("load_checkpoint: truncated header in " + path);
    const nlohmann::json header = nlohmann::json::parse(header_str);

    Checkpoint ckpt;
    ckpt.config = config_from_json(header.at("config"));
    ckpt.history.train_loss = header.at("history").at("train_loss").get<std::vector<double>>();
    ckpt.history.val_loss = header.at("history").at("val_loss").get<std::vector<double>>();
    ckpt.history.best_epoch = header.at("history").at("best_epoch").get<int>();
    ckpt.adam_t = header.at("adam_t").get<std::int64_t>();

    const std::uint64_t payload_start = kMagicLen + sizeof(header_size) + header_size;
    ckpt.params = read_tensors(in, header.at("params"), payload_start, &ckpt.names);
    ckpt.adam_m = read_tensors(in, header.at("adam_m"), payload_start, nullptr);
    ckpt.adam_v = read_tensors(in, header.at("adam_v"), payload_start, nullptr);
    return ckpt;
}

} // namespace nlos
