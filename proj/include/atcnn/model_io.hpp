#ifndef ATCNN_MODEL_IO_HPP
#define ATCNN_MODEL_IO_HPP

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "atcnn/model.hpp"

namespace atcnn {

// Model file: "ATCN" magic, u32 format version, architecture block, named
// tensors (u32 name length, name, u32 rank, i32 dims, float32 payload), and
// a trailing FNV-1a 64 checksum over everything before it. All integers and
// floats are little-endian.

namespace detail {

inline constexpr std::uint32_t kModelVersion = 1;

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_i32(std::string& out, std::int32_t v) {
    put_u32(out, static_cast<std::uint32_t>(v));
}
inline void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

inline std::uint64_t fnv1a(const char* data, std::size_t n) {
    std::uint64_t h = 14695981039346656037ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 1099511628211ull;
    }
    return h;
}

struct ModelReader {
    const std::string& buf;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > buf.size()) throw std::runtime_error("model file truncated");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    float f32() { return std::bit_cast<float>(u32()); }
    std::string str(std::size_t n) {
        need(n);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
};

inline void put_tensor(std::string& out, const std::string& name, const TensorRef& t) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.append(name);
    put_u32(out, static_cast<std::uint32_t>(t->shape.size()));
    for (int d : t->shape) put_i32(out, d);
    for (float v : t->values) put_f32(out, v);
}

// canonical name for every parameter slot
inline std::vector<std::pair<std::string, TensorRef>> named_params(const AtcnnModel& m) {
    std::vector<std::pair<std::string, TensorRef>> out;
    for (const auto& s : m.stacks) {
        const std::string prefix = "lead" + std::to_string(s.lead) + ".";
        for (std::size_t l = 0; l < s.conv_w.size(); ++l) {
            const int block = static_cast<int>(l) / m.config.layers_per_block;
            const int layer = static_cast<int>(l) % m.config.layers_per_block;
            const std::string conv = prefix + "block" + std::to_string(block) + ".conv" +
                                     std::to_string(layer) + ".";
            out.emplace_back(conv + "weight", s.conv_w[l]);
            out.emplace_back(conv + "bias", s.conv_b[l]);
        }
        if (s.attn_w) {
            out.emplace_back(prefix + "attn.w", s.attn_w);
            out.emplace_back(prefix + "attn.b", s.attn_b);
        }
    }
    if (m.spatial_w) {
        out.emplace_back("spatial.w", m.spatial_w);
        out.emplace_back("spatial.b", m.spatial_b);
    }
    out.emplace_back("head.weight", m.head_w);
    out.emplace_back("head.bias", m.head_b);
    return out;
}

}  // namespace detail

inline void save_model(const AtcnnModel& m, const std::filesystem::path& path) {
    std::string buf;
    buf.append("ATCN");
    detail::put_u32(buf, detail::kModelVersion);

    const auto& cfg = m.config;
    detail::put_u32(buf, static_cast<std::uint32_t>(cfg.variant));
    detail::put_i32(buf, cfg.channels);
    detail::put_i32(buf, cfg.kernel);
    detail::put_i32(buf, cfg.layers_per_block);
    detail::put_i32(buf, cfg.samples);
    detail::put_i32(buf, cfg.target_class);
    buf.push_back(cfg.per_timestep_temporal_bias ? 1 : 0);
    buf.push_back(cfg.residual ? 1 : 0);
    detail::put_u32(buf, static_cast<std::uint32_t>(cfg.dilations.size()));
    for (int d : cfg.dilations) detail::put_i32(buf, d);
    detail::put_u32(buf, static_cast<std::uint32_t>(cfg.leads.size()));
    for (int m2 : cfg.leads) detail::put_i32(buf, m2);

    const auto named = detail::named_params(m);
    detail::put_u32(buf, static_cast<std::uint32_t>(named.size()));
    for (const auto& [name, t] : named) detail::put_tensor(buf, name, t);

    detail::put_u64(buf, detail::fnv1a(buf.data(), buf.size()));

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model file: " + path.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline AtcnnModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string buf = ss.str();

    if (buf.size() < 16 || buf.compare(0, 4, "ATCN") != 0)
        throw std::runtime_error("not a model file (bad magic): " + path.string());
    const std::uint64_t stored = [&buf] {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(
                     static_cast<unsigned char>(buf[buf.size() - 8 + static_cast<std::size_t>(i)]))
                 << (8 * i);
        return v;
    }();
    if (detail::fnv1a(buf.data(), buf.size() - 8) != stored)
        throw std::runtime_error("model file checksum mismatch (file damaged?): " + path.string());

    detail::ModelReader r{buf, 4};
    const auto version = r.u32();
    if (version != detail::kModelVersion)
        throw std::runtime_error("unsupported model file version " + std::to_string(version));

    ArchConfig cfg;
    const auto variant_code = r.u32();
    if (variant_code > 3) throw std::runtime_error("model file has unknown variant code");
    cfg.variant = static_cast<Variant>(variant_code);
    cfg.channels = r.i32();
    cfg.kernel = r.i32();
    cfg.layers_per_block = r.i32();
    cfg.samples = r.i32();
    cfg.target_class = r.i32();
    r.need(2);
    cfg.per_timestep_temporal_bias = buf[r.pos++] != 0;
    cfg.residual = buf[r.pos++] != 0;
    cfg.dilations.resize(r.u32());
    for (auto& d : cfg.dilations) d = r.i32();
    cfg.leads.resize(r.u32());
    for (auto& m2 : cfg.leads) m2 = r.i32();

    AtcnnModel model(cfg);  // validates the configuration
    std::map<std::string, TensorRef> slots;
    for (auto& [name, t] : detail::named_params(model)) slots.emplace(name, t);

    const auto count = r.u32();
    if (count != slots.size())
        throw std::runtime_error("model file holds " + std::to_string(count) + " tensors, expected " +
                                 std::to_string(slots.size()));
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto name = r.str(r.u32());
        const auto it = slots.find(name);
        if (it == slots.end())
            throw std::runtime_error("model file has unexpected tensor: " + name);
        auto& t = it->second;
        std::vector<int> shape(r.u32());
        for (auto& d : shape) d = r.i32();
        if (shape != t->shape)
            throw std::runtime_error("model file tensor has wrong shape: " + name);
        for (auto& v : t->values) v = r.f32();
        slots.erase(it);
    }
    if (!slots.empty())
        throw std::runtime_error("model file missing tensor: " + slots.begin()->first);
    return model;
}

}  // namespace atcnn

#endif
