#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "bezierflow/field.hpp"
#include "bezierflow/json_util.hpp"

namespace bezierflow {

// Training provenance carried inside a weight archive.
struct WeightProvenance {
    std::string config_digest;
    std::uint64_t seed = 0;
    std::uint64_t steps = 0;
    std::string objective = "rectified_flow";
    int reflow_level = 0;
};

namespace detail {

constexpr char weights_magic[4] = {'B', 'Z', 'F', 'W'};
constexpr std::uint32_t weights_version = 1;

inline void put_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32(std::ifstream& in, const std::string& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        throw IoError("weight archive truncated: " + path);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

inline void put_f64(std::ofstream& out, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(b), 8);
}

inline double get_f64(std::ifstream& in, const std::string& path) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8))
        throw IoError("weight archive truncated: " + path);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

} // namespace detail

// Layout: magic, version, header length, JSON header (spec + provenance +
// param count), then the flat little-endian 64-bit parameter array, layer by
// layer, each weight matrix row-major followed by its bias.
inline void save_weights(const VelocityField& field, const std::string& path,
                         const WeightProvenance& prov = {}) {
    check_shapes(field.spec, field.params);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);

    json header;
    header["label"] = field.label;
    header["spec"] = mlp_spec_to_json(field.spec);
    header["spec"]["data_dim"] = field.spec.data_dim;
    header["param_count"] = field.params.scalar_count();
    header["provenance"] = {{"config_digest", prov.config_digest},
                            {"seed", prov.seed},
                            {"steps", prov.steps},
                            {"objective", prov.objective},
                            {"reflow_level", prov.reflow_level}};
    const std::string header_text = header.dump();

    out.write(detail::weights_magic, 4);
    detail::put_u32(out, detail::weights_version);
    detail::put_u32(out, static_cast<std::uint32_t>(header_text.size()));
    out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
    for (std::size_t l = 0; l < field.params.weights.size(); ++l) {
        for (double v : field.params.weights[l].data) detail::put_f64(out, v);
        for (double v : field.params.biases[l]) detail::put_f64(out, v);
    }
    if (!out) throw IoError("write failure: " + path);
}

inline VelocityField load_weights(const std::string& path, WeightProvenance* prov_out = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);

    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, detail::weights_magic, 4) != 0)
        throw IoError("not a weight archive: " + path);
    const std::uint32_t version = detail::get_u32(in, path);
    if (version != detail::weights_version)
        throw IoError("weight archive version " + std::to_string(version) + " unsupported: " +
                      path);
    const std::uint32_t header_len = detail::get_u32(in, path);
    std::string header_text(header_len, '\0');
    if (!in.read(header_text.data(), header_len))
        throw IoError("weight archive truncated: " + path);

    json header;
    try {
        header = json::parse(header_text);
    } catch (const json::exception&) {
        throw IoError("weight archive header corrupt: " + path);
    }

    VelocityField field;
    try {
        field.label = header.at("label").get<std::string>();
        json spec_json = header.at("spec");
        const std::size_t data_dim = spec_json.at("data_dim").get<std::size_t>();
        spec_json.erase("data_dim");
        field.spec = mlp_spec_from_json(spec_json, "archive.spec", data_dim);
        if (prov_out) {
            const json& p = header.at("provenance");
            prov_out->config_digest = p.at("config_digest").get<std::string>();
            prov_out->seed = p.at("seed").get<std::uint64_t>();
            prov_out->steps = p.at("steps").get<std::uint64_t>();
            prov_out->objective = p.at("objective").get<std::string>();
            prov_out->reflow_level = p.at("reflow_level").get<int>();
        }
    } catch (const json::exception&) {
        throw IoError("weight archive header incomplete: " + path);
    }

    const auto sizes = field.spec.layer_sizes();
    std::size_t expected = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l)
        expected += sizes[l + 1] * sizes[l] + sizes[l + 1];
    const std::size_t declared = header.at("param_count").get<std::size_t>();
    if (declared != expected)
        throw IoError("weight archive parameter count " + std::to_string(declared) +
                      " disagrees with its spec (expected " + std::to_string(expected) + "): " +
                      path);

    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        Matrix w(sizes[l + 1], sizes[l]);
        for (double& v : w.data) v = detail::get_f64(in, path);
        Vector b(sizes[l + 1]);
        for (double& v : b) v = detail::get_f64(in, path);
        field.params.weights.push_back(std::move(w));
        field.params.biases.push_back(std::move(b));
    }
    char extra;
    if (in.read(&extra, 1))
        throw IoError("weight archive has trailing bytes: " + path);
    check_shapes(field.spec, field.params);
    return field;
}

} // namespace bezierflow
