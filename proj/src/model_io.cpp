#include "tickerlab/model_io.h"

#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "tickerlab/error.h"
#include "tickerlab/util.h"

namespace tickerlab::models {

namespace {

using nlohmann::json;

constexpr std::string_view kMagic = "TKLB";

class Writer {
public:
    void bytes(std::string_view s) { out_.append(s); }
    void u32(std::uint32_t v) { le(v, 4); }
    void u64(std::uint64_t v) { le(v, 8); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    std::string& str() { return out_; }

private:
    void le(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) {
            out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
        }
    }
    std::string out_;
};

class Reader {
public:
    explicit Reader(const std::string& in) : in_(in) {}

    std::string_view bytes(std::size_t n) {
        need(n);
        std::string_view s(in_.data() + pos_, n);
        pos_ += n;
        return s;
    }
    std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
    std::uint64_t u64() { return le(8); }
    double f64() { return std::bit_cast<double>(u64()); }
    bool at_end() const { return pos_ == in_.size(); }
    std::size_t remaining() const { return in_.size() - pos_; }

private:
    void need(std::size_t n) {
        if (in_.size() - pos_ < n) {
            throw Error(ErrorCode::kCorruptFile, "truncated model file");
        }
    }
    std::uint64_t le(int n) {
        need(static_cast<std::size_t>(n));
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
        }
        pos_ += static_cast<std::size_t>(n);
        return v;
    }
    const std::string& in_;
    std::size_t pos_ = 0;
};

json exact(double v) {
    return {{"value", std::isfinite(v) ? json(v) : json(nullptr)},
            {"bits", to_hex(std::bit_cast<std::uint64_t>(v))}};
}

std::uint64_t parse_hex(const std::string& s) {
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
        v = std::stoull(s, &used, 16);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty()) {
        throw Error(ErrorCode::kCorruptFile, "bad hex field '" + s + "'");
    }
    return v;
}

double read_exact(const json& j) { return std::bit_cast<double>(parse_hex(j.at("bits").get<std::string>())); }

json metadata(const TrainedModel& m) {
    const auto& spec = m.spec();
    json loss = json::array();
    for (const auto& e : m.loss_history) {
        loss.push_back({exact(e.train), exact(e.validation)});
    }
    const auto& c = m.config;
    return {
        {"format", "tickerlab-model"},
        {"spec",
         {{"architecture", std::string(architecture_name(spec.architecture))},
          {"units", spec.units},
          {"units2", spec.units2},
          {"filters", spec.filters},
          {"kernel_width", spec.kernel_width},
          {"window", spec.window}}},
        {"scaler", {{"min", exact(m.scaler.min_value)}, {"max", exact(m.scaler.max_value)}}},
        {"fingerprint",
         {{"seed", m.fingerprint.seed},
          {"config_hash", to_hex(m.fingerprint.config_hash)},
          {"data_hash", to_hex(m.fingerprint.data_hash)}}},
        {"train_config",
         {{"epochs", c.epochs},
          {"learning_rate", exact(c.learning_rate)},
          {"batch_size", c.batch_size},
          {"seed", c.seed},
          {"early_stop_patience", c.early_stop_patience},
          {"validation_fraction", exact(c.validation_fraction)},
          {"clip_norm", exact(c.clip_norm)}}},
        {"best_epoch", m.best_epoch},
        {"loss_history", loss},
    };
}

std::uint64_t section_checksum(std::string_view name, const nn::Tensor& t) {
    Fnv1a h;
    h.update(name);
    for (std::size_t d : t.shape()) {
        h.update(static_cast<std::uint64_t>(d));
    }
    h.update(t.values());
    return h.digest();
}

}  // namespace

std::string serialize_model(const TrainedModel& model) {
    Writer w;
    w.bytes(kMagic);
    w.u32(kModelFormatVersion);
    const std::string meta = metadata(model).dump(2);
    w.u64(meta.size());
    w.bytes(meta);
    Fnv1a meta_hash;
    meta_hash.update(meta);
    w.u64(meta_hash.digest());

    const auto& weights = model.network.weights();
    const auto tensors = weights.tensors();
    const auto names = weights.tensor_names();
    w.u32(static_cast<std::uint32_t>(tensors.size()));
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        const nn::Tensor& t = *tensors[i];
        w.u32(static_cast<std::uint32_t>(names[i].size()));
        w.bytes(names[i]);
        w.u32(static_cast<std::uint32_t>(t.rank()));
        for (std::size_t d : t.shape()) {
            w.u64(d);
        }
        w.u64(t.size());
        for (double v : t.values()) {
            w.f64(v);
        }
        w.u64(section_checksum(names[i], t));
    }
    return std::move(w.str());
}

TrainedModel deserialize_model(const std::string& bytes) {
    Reader r(bytes);
    if (bytes.size() < kMagic.size() || r.bytes(kMagic.size()) != kMagic) {
        throw Error(ErrorCode::kCorruptFile, "missing TKLB magic");
    }
    const std::uint32_t version = r.u32();
    if (version != kModelFormatVersion) {
        throw Error(ErrorCode::kUnsupportedVersion,
                    "format version " + std::to_string(version) + ", expected " +
                        std::to_string(kModelFormatVersion));
    }
    const std::uint64_t meta_len = r.u64();
    if (meta_len > r.remaining()) {
        throw Error(ErrorCode::kCorruptFile, "truncated metadata");
    }
    const std::string meta_text(r.bytes(meta_len));
    Fnv1a meta_hash;
    meta_hash.update(meta_text);
    if (r.u64() != meta_hash.digest()) {
        throw Error(ErrorCode::kCorruptFile, "metadata checksum mismatch");
    }

    TrainedModel m;
    ModelSpec spec;
    try {
        const json meta = json::parse(meta_text);
        const auto& s = meta.at("spec");
        const auto arch = parse_architecture(s.at("architecture").get<std::string>());
        if (!arch) {
            throw Error(ErrorCode::kCorruptFile, "unknown architecture");
        }
        spec.architecture = *arch;
        spec.units = s.at("units").get<std::size_t>();
        spec.units2 = s.at("units2").get<std::size_t>();
        spec.filters = s.at("filters").get<std::size_t>();
        spec.kernel_width = s.at("kernel_width").get<std::size_t>();
        spec.window = s.at("window").get<std::size_t>();
        m.scaler = {read_exact(meta.at("scaler").at("min")), read_exact(meta.at("scaler").at("max"))};
        const auto& fp = meta.at("fingerprint");
        m.fingerprint = {fp.at("seed").get<std::uint64_t>(),
                         parse_hex(fp.at("config_hash").get<std::string>()),
                         parse_hex(fp.at("data_hash").get<std::string>())};
        const auto& c = meta.at("train_config");
        m.config.epochs = c.at("epochs").get<std::size_t>();
        m.config.learning_rate = read_exact(c.at("learning_rate"));
        m.config.batch_size = c.at("batch_size").get<std::size_t>();
        m.config.seed = c.at("seed").get<std::uint64_t>();
        m.config.early_stop_patience = c.at("early_stop_patience").get<std::size_t>();
        m.config.validation_fraction = read_exact(c.at("validation_fraction"));
        m.config.clip_norm = read_exact(c.at("clip_norm"));
        m.best_epoch = meta.at("best_epoch").get<std::size_t>();
        for (const auto& e : meta.at("loss_history")) {
            m.loss_history.push_back({read_exact(e.at(0)), read_exact(e.at(1))});
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::kCorruptFile, std::string("metadata: ") + e.what());
    }

    // Shapes come from a freshly built network of the same spec; every
    // section must match one of them exactly.
    NetworkWeights weights = build(spec, 0).weights();
    const auto tensors = weights.tensors();
    const auto names = weights.tensor_names();
    const std::uint32_t sections = r.u32();
    if (sections != tensors.size()) {
        throw Error(ErrorCode::kCorruptFile, "expected " + std::to_string(tensors.size()) +
                                                 " weight sections, found " +
                                                 std::to_string(sections));
    }
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        nn::Tensor& t = *tensors[i];
        const std::uint32_t name_len = r.u32();
        const std::string name(r.bytes(name_len));
        if (name != names[i]) {
            throw Error(ErrorCode::kCorruptFile, "unexpected section '" + name + "'");
        }
        const std::uint32_t rank = r.u32();
        std::vector<std::size_t> shape(rank);
        for (auto& d : shape) {
            d = r.u64();
        }
        if (shape != t.shape()) {
            throw Error(ErrorCode::kCorruptFile, "section '" + name + "' has the wrong shape");
        }
        const std::uint64_t count = r.u64();
        if (count != t.size() || count > r.remaining() / 8) {
            throw Error(ErrorCode::kCorruptFile, "section '" + name + "' size");
        }
        for (double& v : t.values()) {
            v = r.f64();
        }
        if (r.u64() != section_checksum(name, t)) {
            throw Error(ErrorCode::kCorruptFile, "checksum mismatch in '" + name + "'");
        }
    }
    if (!r.at_end()) {
        throw Error(ErrorCode::kCorruptFile, "trailing bytes after weights");
    }
    m.network = Network(spec, std::move(weights));
    return m;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    const std::string bytes = serialize_model(model);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
    }
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return deserialize_model(ss.str());
}

}  // namespace tickerlab::models
