#include "ptolearn/fnm/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace ptolearn::fnm {

namespace {

constexpr char kMagic[8] = {'F', 'N', 'M', 'C', 'K', 'P', 'T', '\0'};

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

void write_u32(std::ostream& out, std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }

std::uint32_t read_u32(std::istream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

}  // namespace

nlohmann::json config_to_json(const FnmConfig& c) {
    return {{"variant", to_string(c.variant)}, {"inputDim", c.inputDim},       {"outputDim", c.outputDim},
            {"width", c.width},                {"modes", c.modes},             {"depth", c.depth},
            {"latentDim", c.latentDim},        {"functionalDim", c.functionalDim}, {"auxiliary", c.auxiliary},
            {"auxiliaryDim", c.auxiliaryDim},  {"finalIdentity", c.finalIdentity}, {"resolution", c.resolution}};
}

FnmConfig config_from_json(const nlohmann::json& j) {
    FnmConfig c;
    c.variant = variant_from_string(j.value("variant", to_string(c.variant)));
    c.inputDim = j.value("inputDim", c.inputDim);
    c.outputDim = j.value("outputDim", c.outputDim);
    c.width = j.value("width", c.width);
    c.modes = j.value("modes", c.modes);
    c.depth = j.value("depth", c.depth);
    c.latentDim = j.value("latentDim", c.latentDim);
    c.functionalDim = j.value("functionalDim", c.functionalDim);
    c.auxiliary = j.value("auxiliary", c.auxiliary);
    c.auxiliaryDim = j.value("auxiliaryDim", c.auxiliaryDim);
    c.finalIdentity = j.value("finalIdentity", c.finalIdentity);
    c.resolution = j.value("resolution", c.resolution);
    return c;
}

void save_checkpoint(const std::string& path, const FnmModel& model) {
    FnmParameters params = model.parameters();
    const auto blocks = parameter_blocks(params);

    nlohmann::json header;
    header["config"] = config_to_json(model.config());
    header["arrays"] = nlohmann::json::array();
    std::uint64_t offset = 0;
    for (const auto& b : blocks) {
        header["arrays"].push_back({{"name", b.name},
                                    {"shape", {b.rows, b.cols}},
                                    {"dtype", b.complex ? "complex128" : "float64"},
                                    {"offset", offset}});
        offset += static_cast<std::uint64_t>(b.size());
    }
    const std::string text = header.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
    out.write(kMagic, sizeof kMagic);
    write_u32(out, kCheckpointVersion);
    write_u32(out, static_cast<std::uint32_t>(text.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& b : blocks)
        out.write(reinterpret_cast<const char*>(b.data), static_cast<std::streamsize>(b.size() * sizeof(double)));
    if (!out) throw std::runtime_error("failed writing checkpoint: " + path);
}

FnmModel load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw std::runtime_error("not an FNM checkpoint: " + path);
    const std::uint32_t version = read_u32(in);
    if (version != kCheckpointVersion)
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
    const std::uint32_t length = read_u32(in);
    std::string text(length, '\0');
    in.read(text.data(), length);
    if (!in) throw std::runtime_error("truncated checkpoint header: " + path);
    const nlohmann::json header = nlohmann::json::parse(text);

    const FnmConfig config = config_from_json(header.at("config"));
    FnmParameters params = zero_parameters(config);
    auto blocks = parameter_blocks(params);
    const auto& table = header.at("arrays");
    if (table.size() != blocks.size()) throw std::runtime_error("checkpoint array table does not match its config");

    std::vector<double> payload;
    for (;;) {
        double x;
        if (!in.read(reinterpret_cast<char*>(&x), sizeof x)) break;
        payload.push_back(x);
    }
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto& entry = table[i];
        const auto& b = blocks[i];
        const bool isComplex = entry.at("dtype").get<std::string>() == "complex128";
        if (entry.at("name").get<std::string>() != b.name || entry.at("shape")[0].get<Eigen::Index>() != b.rows ||
            entry.at("shape")[1].get<Eigen::Index>() != b.cols || isComplex != b.complex)
            throw std::runtime_error("checkpoint array '" + entry.at("name").get<std::string>() +
                                     "' does not match the expected layout");
        const auto offset = entry.at("offset").get<std::size_t>();
        if (offset + static_cast<std::size_t>(b.size()) > payload.size())
            throw std::runtime_error("checkpoint payload is truncated");
        std::memcpy(b.data, payload.data() + offset, static_cast<std::size_t>(b.size()) * sizeof(double));
    }
    return FnmModel(config, std::move(params));
}

}  // namespace ptolearn::fnm
