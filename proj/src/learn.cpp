#include "raci/learn.hpp"

#include "raci/errors.hpp"
#include "raci/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace raci::learn {

void TrainConfig::validate() const {
    if (batch_size < 1) throw config_error("train.batch_size must be >= 1");
    if (!(learning_rate >= 0.0)) throw config_error("train.learning_rate must be >= 0");
    if (epochs < 1) throw config_error("train.epochs must be >= 1");
    if (tbptt_horizon < 1) throw config_error("train.tbptt_horizon must be >= 1");
    if (precision != "double")
        throw config_error("train.precision: only 'double' is supported");
}

void adam_step(ParameterSet& params, const ParameterSet& grads, AdamState& state,
               const TrainConfig& config) {
    state.t += 1;
    const double b1 = config.beta1, b2 = config.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.entries().size(); ++i) {
        auto& p = params.entries()[i].value;
        const auto& g = grads.entries()[i].value;
        auto& m = state.m.entries()[i].value;
        auto& v = state.v.entries()[i].value;
        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v.array().matrix() + (1.0 - b2) * g.array().square().matrix();
        Eigen::ArrayXXd mhat = m.array() / bc1;
        Eigen::ArrayXXd vhat = v.array() / bc2;
        p.array() -= config.learning_rate * mhat / (vhat.sqrt() + config.epsilon);
    }
}

// ---------------------------------------------------------------------------
// Checkpoint serialization: explicit little-endian byte layout.

namespace {

constexpr char kMagic[8] = {'R', 'A', 'C', 'I', 'C', 'K', 'P', 'T'};

void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_f64(std::string& buf, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    put_u64(buf, bits);
}

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > buf.size()) throw data_error("checkpoint: truncated file");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }
    double f64() {
        std::uint64_t bits = u64();
        double d;
        std::memcpy(&d, &bits, 8);
        return d;
    }
    std::string str(std::size_t n) {
        need(n);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
};

void put_tensor_section(std::string& buf, const ParameterSet& set) {
    put_u32(buf, static_cast<std::uint32_t>(set.size()));
    for (const auto& e : set.entries()) {
        put_u32(buf, static_cast<std::uint32_t>(e.name.size()));
        buf.append(e.name);
        put_u32(buf, static_cast<std::uint32_t>(e.value.rows()));
        put_u32(buf, static_cast<std::uint32_t>(e.value.cols()));
        for (Eigen::Index c = 0; c < e.value.cols(); ++c)
            for (Eigen::Index r = 0; r < e.value.rows(); ++r) put_f64(buf, e.value(r, c));
    }
}

ParameterSet read_tensor_section(Reader& rd) {
    ParameterSet set;
    const std::uint32_t count = rd.u32();
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t name_len = rd.u32();
        std::string name = rd.str(name_len);
        const std::uint32_t rows = rd.u32();
        const std::uint32_t cols = rd.u32();
        auto& m = set.add(name, rows, cols);
        for (std::uint32_t c = 0; c < cols; ++c)
            for (std::uint32_t r = 0; r < rows; ++r) m(r, c) = rd.f64();
    }
    return set;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    std::string buf;
    buf.append(kMagic, sizeof(kMagic));
    put_u32(buf, ckpt.version);
    put_u64(buf, ckpt.config_hash);
    put_u32(buf, ckpt.epoch);
    put_u64(buf, ckpt.rng_seed);
    put_u64(buf, ckpt.adam.t);
    put_tensor_section(buf, ckpt.params);
    put_tensor_section(buf, ckpt.adam.m);
    put_tensor_section(buf, ckpt.adam.v);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw data_error("checkpoint: cannot open for writing: " + path.string());
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!os) throw data_error("checkpoint: write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("checkpoint: cannot open: " + path.string());
    std::string buf((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    Reader rd{buf};
    std::string magic = rd.str(sizeof(kMagic));
    if (std::memcmp(magic.data(), kMagic, sizeof(kMagic)) != 0)
        throw data_error("checkpoint: bad magic (not a checkpoint file)");
    Checkpoint ckpt;
    ckpt.version = rd.u32();
    if (ckpt.version != 1)
        throw data_error("checkpoint: unsupported version " + std::to_string(ckpt.version));
    ckpt.config_hash = rd.u64();
    ckpt.epoch = rd.u32();
    ckpt.rng_seed = rd.u64();
    ckpt.adam.t = rd.u64();
    ckpt.params = read_tensor_section(rd);
    ckpt.adam.m = read_tensor_section(rd);
    ckpt.adam.v = read_tensor_section(rd);
    return ckpt;
}

// ---------------------------------------------------------------------------

TrainResult train(const std::vector<Scene>& dataset, const Model& model,
                  const TrainConfig& config, const head::PoseWeights& weights,
                  std::uint64_t config_hash, const Checkpoint* resume_from,
                  Checkpoint* last_good) {
    config.validate();
    if (dataset.empty()) throw data_error("train: empty dataset");
    for (const auto& scene : dataset) {
        for (const auto& f : scene.frames) model.validate_frame(f);
        if (scene.frames.empty()) throw data_error("train: scene '" + scene.name + "' has no frames");
    }

    TrainResult result;
    Checkpoint& ckpt = result.checkpoint;
    if (resume_from) {
        ckpt = *resume_from;
    } else {
        ckpt.params = model.init_params(config.seed);
        ckpt.adam = AdamState::zero(ckpt.params);
        ckpt.epoch = 0;
    }
    ckpt.config_hash = config_hash;
    ckpt.rng_seed = config.seed;
    if (last_good) *last_good = ckpt;

    for (int epoch = static_cast<int>(ckpt.epoch) + 1; epoch <= config.epochs; ++epoch) {
        std::vector<std::size_t> order(dataset.size());
        std::iota(order.begin(), order.end(), 0);
        auto rng = named_stream(config.seed, "shuffle/epoch" + std::to_string(epoch));
        std::shuffle(order.begin(), order.end(), rng);

        double epoch_loss_sum = 0.0;
        std::size_t epoch_frames = 0;
        int step = 0;
        for (std::size_t scene_idx : order) {
            const Scene& scene = dataset[scene_idx];
            encoders::LstmState state = model.initial_state();
            std::size_t pos = 0;
            const std::size_t total = scene.frames.size();
            while (pos < total) {
                // One optimizer step over up to batch_size consecutive
                // truncation windows; state flows forward detached.
                ParameterSet grads = ckpt.params.zeros_like();
                double batch_loss = 0.0;
                std::size_t batch_frames = 0;
                for (int w = 0; w < config.batch_size && pos < total; ++w) {
                    const std::size_t len =
                        std::min<std::size_t>(config.tbptt_horizon, total - pos);
                    std::vector<const EstimationFrame*> window;
                    window.reserve(len);
                    for (std::size_t j = 0; j < len; ++j) window.push_back(&scene.frames[pos + j]);
                    auto tape = model.forward_window(window, ckpt.params, state, weights);
                    model.backward_window(tape, ckpt.params, weights, grads);
                    state = tape.state_out;
                    batch_loss += tape.loss_sum;
                    batch_frames += len;
                    pos += len;
                }
                // These params just produced a finite batch; snapshot them
                // before stepping so an abort keeps a usable model.
                if (last_good) *last_good = ckpt;
                grads.scale(1.0 / static_cast<double>(batch_frames));
                adam_step(ckpt.params, grads, ckpt.adam, config);
                ++step;
                result.curve.push_back(
                    {epoch, step, batch_loss / static_cast<double>(batch_frames)});
                epoch_loss_sum += batch_loss;
                epoch_frames += batch_frames;
            }
        }
        result.epoch_loss.push_back(epoch_loss_sum / static_cast<double>(epoch_frames));
        ckpt.epoch = static_cast<std::uint32_t>(epoch);
    }
    return result;
}

void write_loss_csv(const std::filesystem::path& path, const std::vector<LossPoint>& curve) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw data_error("cannot open loss CSV for writing: " + path.string());
    os << "epoch,step,loss\n";
    os.precision(17);
    for (const auto& p : curve) os << p.epoch << ',' << p.step << ',' << p.loss << '\n';
}

}  // namespace raci::learn
