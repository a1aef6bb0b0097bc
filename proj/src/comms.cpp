#include "emgvalid/comms.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <numbers>
#include <thread>

namespace emgvalid::comms {

std::uint8_t xor_checksum(std::span<const std::uint8_t> bytes) {
    std::uint8_t c = 0;
    for (auto b : bytes) c ^= b;
    return c;
}

FrameBytes encode_frame(const Frame& f) {
    FrameBytes out{};
    out[0] = kSync0;
    out[1] = kSync1;
    out[2] = static_cast<std::uint8_t>(f.seq & 0xFF);
    out[3] = static_cast<std::uint8_t>(f.seq >> 8);
    for (int i = 0; i < 4; ++i) out[4 + i] = static_cast<std::uint8_t>((f.t_ms >> (8 * i)) & 0xFF);
    for (std::size_t ch = 0; ch < kChannels; ++ch) {
        out[8 + 2 * ch] = static_cast<std::uint8_t>(f.samples[ch] & 0xFF);
        out[9 + 2 * ch] = static_cast<std::uint8_t>(f.samples[ch] >> 8);
    }
    out[24] = xor_checksum(std::span<const std::uint8_t>(out.data(), 24));
    return out;
}

DecodeResult decode_frame(std::span<const std::uint8_t> b) {
    if (b.size() < kFrameSize) return {DecodeStatus::Truncated, std::nullopt};
    if (b[0] != kSync0 || b[1] != kSync1) return {DecodeStatus::NoSync, std::nullopt};
    if (xor_checksum(b.first(24)) != b[24]) return {DecodeStatus::ChecksumMismatch, std::nullopt};
    Frame f;
    f.seq = static_cast<std::uint16_t>(b[2] | (b[3] << 8));
    f.t_ms = static_cast<std::uint32_t>(b[4]) | (static_cast<std::uint32_t>(b[5]) << 8) |
             (static_cast<std::uint32_t>(b[6]) << 16) | (static_cast<std::uint32_t>(b[7]) << 24);
    for (std::size_t ch = 0; ch < kChannels; ++ch)
        f.samples[ch] = static_cast<std::uint16_t>(b[8 + 2 * ch] | (b[9 + 2 * ch] << 8));
    return {DecodeStatus::Ok, f};
}

// ── Analyzer ──────────────────────────────────────────────────────────────

VerdictLevel StreamIntegrityReport::verdict() const {
    return continuity_ok && count_matches_expected ? VerdictLevel::Pass : VerdictLevel::Fail;
}

StreamAnalyzer::StreamAnalyzer(AnalyzerOptions opts) : opts_(opts) {
    if (!(opts_.nominal_rate_hz > 0.0)) throw Error("nominal frame rate must be > 0");
    rep_.nominal_rate_hz = opts_.nominal_rate_hz;
    rep_.count_tolerance_frames = opts_.count_tolerance_frames;
}

void StreamAnalyzer::feed(std::span<const std::uint8_t> chunk) {
    buf_.insert(buf_.end(), chunk.begin(), chunk.end());
    rep_.bytes += chunk.size();
    process(false);
}

void StreamAnalyzer::accept(const Frame& f, std::uint64_t offset) {
    if (need_resync_) {
        ++rep_.resyncs;
        need_resync_ = false;
    }
    if (prev_) {
        const auto seq_gap = static_cast<std::uint16_t>(f.seq - prev_->seq - 1);
        const auto dt = static_cast<std::int32_t>(f.t_ms - prev_->t_ms);
        if (dt > 0 && (!rep_.max_inter_frame_gap_ms || dt > *rep_.max_inter_frame_gap_ms))
            rep_.max_inter_frame_gap_ms = dt;

        std::uint64_t missing = seq_gap;
        const double est = static_cast<double>(dt) * opts_.nominal_rate_hz / 1000.0 - 1.0;
        if (seq_gap >= 0x8000 && est < 0x8000) {
            // Repeated or reordered frame rather than a gap of half the sequence space.
            ++rep_.out_of_order;
            missing = 0;
        } else if (est > 0xFFFF) {
            const auto wraps = std::llround((est - seq_gap) / 65536.0);
            if (wraps > 0) missing += 65536ULL * static_cast<std::uint64_t>(wraps);
        }
        const std::uint64_t lost = missing > corrupted_since_ok_ ? missing - corrupted_since_ok_ : 0;
        if (lost > 0) {
            rep_.lost += lost;
            rep_.gaps.push_back({prev_->seq, f.seq, lost, offset});
        }
    } else {
        first_t_ = f.t_ms;
    }
    corrupted_since_ok_ = 0;
    prev_ = f;
    ++rep_.received_ok;
}

namespace {
constexpr std::size_t kAlignedLookahead = 8;
}  // namespace

void StreamAnalyzer::process(bool final) {
    for (;;) {
        const std::size_t rem = buf_.size() - pos_;
        if (locked_) {
            if (rem < kFrameSize) {
                if (final && rem > 0) {
                    rep_.garbage_bytes += rem;
                    pos_ = buf_.size();
                }
                break;
            }
            const auto slot = std::span<const std::uint8_t>(buf_).subspan(pos_, kFrameSize);
            const auto d = decode_frame(slot);
            if (d.ok()) {
                accept(*d.frame, consumed_ + pos_);
                pos_ += kFrameSize;
                continue;
            }
            // Still frame-aligned if the next slot starts with sync, or a later
            // aligned slot holds a valid frame (a run of corrupted frames whose
            // sync bytes were hit), or the stream ends on a slot boundary.
            bool aligned = false;
            if (rem >= kFrameSize + 2 && buf_[pos_ + kFrameSize] == kSync0 && buf_[pos_ + kFrameSize + 1] == kSync1) {
                aligned = true;
            } else if (!final && rem < kFrameSize * (kAlignedLookahead + 1)) {
                break;
            } else {
                for (std::size_t j = 1; j <= kAlignedLookahead; ++j) {
                    const std::size_t q = pos_ + j * kFrameSize;
                    if (q + kFrameSize > buf_.size()) break;
                    if (decode_frame(std::span<const std::uint8_t>(buf_).subspan(q, kFrameSize)).ok()) {
                        aligned = true;
                        break;
                    }
                }
                if (!aligned && final) aligned = rem % kFrameSize == 0 && rem <= kFrameSize * kAlignedLookahead;
            }

            if (aligned) {
                ++rep_.corrupted;
                ++corrupted_since_ok_;
                need_resync_ = true;
                pos_ += kFrameSize;
                continue;
            }
            locked_ = false;
            need_resync_ = need_resync_ || prev_.has_value();
            ++pos_;
            ++rep_.garbage_bytes;
            continue;
        }

        bool found = false;
        std::size_t p = pos_;
        for (; p + 1 < buf_.size(); ++p) {
            if (buf_[p] != kSync0 || buf_[p + 1] != kSync1) continue;
            if (p + kFrameSize > buf_.size()) break;
            if (decode_frame(std::span<const std::uint8_t>(buf_).subspan(p, kFrameSize)).ok()) {
                found = true;
                break;
            }
        }
        if (found) {
            rep_.garbage_bytes += p - pos_;
            pos_ = p;
            locked_ = true;
            continue;
        }
        if (!final) {
            rep_.garbage_bytes += p - pos_;
            pos_ = p;
            break;
        }
        rep_.garbage_bytes += buf_.size() - pos_;
        pos_ = buf_.size();
        break;
    }

    if (pos_ > (1u << 16) && pos_ * 2 > buf_.size()) {
        buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(pos_));
        consumed_ += pos_;
        pos_ = 0;
    }
}

StreamIntegrityReport StreamAnalyzer::finish() {
    process(true);
    if (rep_.received_ok == 0 && rep_.corrupted == 0)
        throw Error("not a frame stream: no sync pattern with a valid checksum found");

    StreamIntegrityReport r = rep_;
    if (opts_.duration_s > 0.0) {
        r.duration_s = opts_.duration_s;
    } else if (prev_) {
        r.duration_s = static_cast<double>(static_cast<std::uint32_t>(prev_->t_ms - first_t_)) / 1000.0 +
                       1.0 / opts_.nominal_rate_hz;
    }
    r.expected_frames = static_cast<std::uint64_t>(std::llround(opts_.nominal_rate_hz * r.duration_s));
    const auto diff = r.received_ok > r.expected_frames ? r.received_ok - r.expected_frames
                                                        : r.expected_frames - r.received_ok;
    r.count_matches_expected = diff <= opts_.count_tolerance_frames;
    r.continuity_ok = r.lost == 0 && r.corrupted == 0;
    return r;
}

StreamIntegrityReport analyze_stream(std::span<const std::uint8_t> bytes, const AnalyzerOptions& opts) {
    StreamAnalyzer a(opts);
    a.feed(bytes);
    return a.finish();
}

// ── Emulator ──────────────────────────────────────────────────────────────

void FaultPlan::validate() const {
    auto prob = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0)) throw Error(std::string(name) + " must be in [0, 1]");
    };
    prob(drop_probability, "drop probability");
    prob(corrupt_probability, "corruption probability");
    if (!(jitter_ms >= 0.0)) throw Error("jitter must be >= 0 ms");
    if (!(rate_hz > 0.0)) throw Error("emulated frame rate must be > 0");
}

std::string_view to_string(FaultType t) {
    switch (t) {
        case FaultType::Drop: return "drop";
        case FaultType::BurstDrop: return "burst_drop";
        case FaultType::Corrupt: return "corrupt";
    }
    return "?";
}

std::uint64_t FaultLedger::count(FaultType t) const {
    return static_cast<std::uint64_t>(
        std::count_if(faults.begin(), faults.end(), [t](const FaultRecord& r) { return r.type == t; }));
}

std::uint64_t FaultLedger::interior_dropped() const {
    if (!first_clean || !last_clean) return 0;
    return static_cast<std::uint64_t>(std::count_if(faults.begin(), faults.end(), [&](const FaultRecord& r) {
        return r.type != FaultType::Corrupt && r.frame_index > *first_clean &&
               r.frame_index < *last_clean;
    }));
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

SignalSource default_signal_source(std::uint64_t seed) {
    return [seed](std::uint64_t i) {
        SampleBlock s{};
        // Half-second bursts every 1.5 s at 800 frames/s; mid-scale baseline.
        const bool active = (i % 1200) < 400;
        for (std::size_t ch = 0; ch < kChannels; ++ch) {
            const std::uint64_t h = splitmix64(seed ^ (i * kChannels + ch) * 0xD1B54A32D192ED03ULL);
            const double noise = static_cast<double>(h >> 11) * 0x1.0p-53 - 0.5;
            const double amp = active ? 900.0 : 30.0;
            const double v = 2048.0 + amp * noise * 2.0 +
                             40.0 * std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 16.0);
            s[ch] = static_cast<std::uint16_t>(std::clamp(std::lround(v), 0L, 4095L));
        }
        return s;
    };
}

Emulator::Emulator(std::uint64_t n_frames, SignalSource source, FaultPlan plan)
    : n_frames_(n_frames), source_(std::move(source)), plan_(plan), rng_(plan.rng_seed) {
    plan_.validate();
    if (!source_) throw Error("emulator needs a signal source");
}

void Emulator::produce(std::vector<std::uint8_t>& out, std::uint64_t max_frames) {
    const auto jitter_max = static_cast<std::int64_t>(std::llround(plan_.jitter_ms));
    for (std::uint64_t k = 0; k < max_frames && next_ < n_frames_; ++k) {
        const std::uint64_t i = next_++;
        // Every frame consumes the same draws so fault decisions stay aligned across plans.
        const double u_drop = rng_.uniform01();
        const double u_corrupt = rng_.uniform01();
        const int byte = static_cast<int>(rng_.uniform_int(0, kFrameSize - 1));
        const int bit = static_cast<int>(rng_.uniform_int(0, 7));
        const auto jitter = rng_.uniform_int(0, jitter_max);

        const auto seq = static_cast<std::uint16_t>(plan_.start_seq + i);
        ++ledger_.frames_generated;

        if (plan_.burst_drop && i >= plan_.burst_drop->start_frame &&
            i < plan_.burst_drop->start_frame + plan_.burst_drop->length) {
            ledger_.faults.push_back({FaultType::BurstDrop, i, seq});
            continue;
        }
        if (u_drop < plan_.drop_probability) {
            ledger_.faults.push_back({FaultType::Drop, i, seq});
            continue;
        }

        Frame f;
        f.seq = seq;
        const auto base = static_cast<std::int64_t>(std::floor(static_cast<double>(i) * 1000.0 / plan_.rate_hz));
        f.t_ms = static_cast<std::uint32_t>(base + jitter);
        f.samples = source_(i);
        FrameBytes bytes = encode_frame(f);

        const bool corrupt = u_corrupt < plan_.corrupt_probability;
        if (corrupt) {
            bytes[static_cast<std::size_t>(byte)] ^= static_cast<std::uint8_t>(1u << bit);
            ledger_.faults.push_back({FaultType::Corrupt, i, seq, byte, bit});
        } else if (prev_emitted_corrupt_) {
            ++ledger_.expected_resyncs;
        }
        prev_emitted_corrupt_ = corrupt;
        if (!corrupt) {
            if (!ledger_.first_clean) ledger_.first_clean = i;
            ledger_.last_clean = i;
        }
        out.insert(out.end(), bytes.begin(), bytes.end());
        ++ledger_.frames_emitted;
    }
}

Emulation emulate(std::uint64_t n_frames, const SignalSource& source, const FaultPlan& plan) {
    Emulator em(n_frames, source, plan);
    Emulation out;
    out.bytes.reserve(static_cast<std::size_t>(n_frames) * kFrameSize);
    em.produce(out.bytes, n_frames);
    out.ledger = em.ledger();
    return out;
}

namespace {

class ChunkQueue {
public:
    explicit ChunkQueue(std::size_t capacity) : capacity_(std::max<std::size_t>(capacity, 1)) {}

    void push(std::vector<std::uint8_t> chunk) {
        std::unique_lock lock(m_);
        not_full_.wait(lock, [&] { return q_.size() < capacity_; });
        q_.push_back(std::move(chunk));
        not_empty_.notify_one();
    }

    void close() {
        std::lock_guard lock(m_);
        closed_ = true;
        not_empty_.notify_all();
    }

    std::optional<std::vector<std::uint8_t>> pop() {
        std::unique_lock lock(m_);
        not_empty_.wait(lock, [&] { return !q_.empty() || closed_; });
        if (q_.empty()) return std::nullopt;
        auto c = std::move(q_.front());
        q_.pop_front();
        not_full_.notify_one();
        return c;
    }

private:
    std::size_t capacity_;
    std::mutex m_;
    std::condition_variable not_full_, not_empty_;
    std::deque<std::vector<std::uint8_t>> q_;
    bool closed_ = false;
};

}  // namespace

PipelineResult run_pipelined(std::uint64_t n_frames, const SignalSource& source, const FaultPlan& plan,
                             const AnalyzerOptions& opts, std::size_t queue_capacity,
                             std::uint64_t frames_per_chunk) {
    Emulator em(n_frames, source, plan);
    StreamAnalyzer an(opts);
    ChunkQueue q(queue_capacity);

    std::exception_ptr producer_error;
    std::thread producer([&] {
        try {
            while (!em.done()) {
                std::vector<std::uint8_t> chunk;
                em.produce(chunk, std::max<std::uint64_t>(frames_per_chunk, 1));
                q.push(std::move(chunk));
            }
        } catch (...) {
            producer_error = std::current_exception();
        }
        q.close();
    });
    while (auto chunk = q.pop()) an.feed(*chunk);
    producer.join();
    if (producer_error) std::rethrow_exception(producer_error);
    return {an.finish(), em.ledger()};
}

}  // namespace emgvalid::comms
