#pragma once

#include "emgvalid/model.hpp"
#include "emgvalid/random.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace emgvalid::comms {

// Wire layout, little-endian, 25 bytes:
//
//   0     1     2..3   4..7   8..23        24
//   0xA5  0x5A  seq    t_ms   8 x u16 ADC  XOR(bytes 0..23)

inline constexpr std::uint8_t kSync0 = 0xA5;
inline constexpr std::uint8_t kSync1 = 0x5A;
inline constexpr std::size_t kFrameSize = 25;
inline constexpr std::size_t kChannels = 8;

using FrameBytes = std::array<std::uint8_t, kFrameSize>;
using SampleBlock = std::array<std::uint16_t, kChannels>;

struct Frame {
    std::uint16_t seq = 0;
    std::uint32_t t_ms = 0;
    SampleBlock samples{};

    bool operator==(const Frame&) const = default;
};

std::uint8_t xor_checksum(std::span<const std::uint8_t> bytes);

FrameBytes encode_frame(const Frame& frame);

enum class DecodeStatus { Ok, Truncated, NoSync, ChecksumMismatch };

struct DecodeResult {
    DecodeStatus status = DecodeStatus::Truncated;
    std::optional<Frame> frame;  // set only when status == Ok

    bool ok() const { return status == DecodeStatus::Ok; }
};

/// Decodes the frame at the start of `bytes`. Never throws on bad data.
DecodeResult decode_frame(std::span<const std::uint8_t> bytes);

// ── Stream integrity ──────────────────────────────────────────────────────

struct AnalyzerOptions {
    double nominal_rate_hz = 800.0;  // frames per second
    /// Session length; <= 0 infers it from the first and last timestamps.
    double duration_s = 0.0;
    /// Allowed |received - expected| at session boundaries; 0 is strict.
    std::uint64_t count_tolerance_frames = 1;
};

struct SequenceGap {
    std::uint16_t after_seq = 0;
    std::uint16_t resume_seq = 0;
    std::uint64_t missing = 0;
    std::uint64_t byte_offset = 0;  // offset of the resuming frame
};

struct StreamIntegrityReport {
    std::uint64_t bytes = 0;
    std::uint64_t expected_frames = 0;
    std::uint64_t received_ok = 0;
    std::uint64_t lost = 0;
    std::uint64_t corrupted = 0;
    std::uint64_t resyncs = 0;
    std::uint64_t garbage_bytes = 0;
    std::uint64_t out_of_order = 0;
    double duration_s = 0.0;
    double nominal_rate_hz = 0.0;
    std::uint64_t count_tolerance_frames = 0;
    bool continuity_ok = false;          // lost == corrupted == 0
    bool count_matches_expected = false; // |received_ok - expected| <= tolerance
    std::optional<double> max_inter_frame_gap_ms;
    std::vector<SequenceGap> gaps;

    VerdictLevel verdict() const;
};

/// Sequential resynchronising state machine over a byte stream. Bytes may be
/// fed in arbitrary chunks; the result does not depend on chunking.
///
/// While locked, each 25-byte slot is either a valid frame or a corrupted
/// frame, provided the stream is still frame-aligned: the next slot starts
/// with the sync pattern, one of the next eight aligned slots decodes, or the
/// stream ends on a slot boundary.
/// Otherwise lock is lost and the analyser hunts byte by byte for a sync
/// pattern followed by a valid checksum. The first valid frame after any
/// failure counts as one resync. Frames lost between two valid frames are
/// the sequence gap (mod 2^16, widened by timestamps) minus the corrupted
/// frames seen in between.
class StreamAnalyzer {
public:
    explicit StreamAnalyzer(AnalyzerOptions opts);

    void feed(std::span<const std::uint8_t> chunk);
    /// Flushes pending bytes and produces the report. Throws if no valid frame was found.
    StreamIntegrityReport finish();

private:
    void process(bool final);
    void accept(const Frame& f, std::uint64_t offset);

    AnalyzerOptions opts_;
    std::vector<std::uint8_t> buf_;
    std::size_t pos_ = 0;
    std::uint64_t consumed_ = 0;  // bytes dropped from the front of buf_
    bool locked_ = true;
    bool need_resync_ = false;
    std::uint64_t corrupted_since_ok_ = 0;
    std::optional<Frame> prev_;
    std::uint32_t first_t_ = 0;
    StreamIntegrityReport rep_;
};

StreamIntegrityReport analyze_stream(std::span<const std::uint8_t> bytes, const AnalyzerOptions& opts);

// ── Fault-injecting emulator ──────────────────────────────────────────────

struct BurstDrop {
    std::uint64_t start_frame = 0;
    std::uint64_t length = 0;
};

struct FaultPlan {
    double drop_probability = 0.0;
    double corrupt_probability = 0.0;
    double jitter_ms = 0.0;
    std::optional<BurstDrop> burst_drop;
    std::uint64_t rng_seed = 0;
    double rate_hz = 800.0;
    std::uint16_t start_seq = 0;

    void validate() const;
};

enum class FaultType { Drop, BurstDrop, Corrupt };

std::string_view to_string(FaultType t);

struct FaultRecord {
    FaultType type = FaultType::Drop;
    std::uint64_t frame_index = 0;
    std::uint16_t seq = 0;
    int byte = -1;  // corrupt only
    int bit = -1;   // corrupt only
};

struct FaultLedger {
    std::uint64_t frames_generated = 0;
    std::uint64_t frames_emitted = 0;
    std::vector<FaultRecord> faults;
    /// Runs of consecutive emitted corrupted frames that are followed by a clean frame.
    std::uint64_t expected_resyncs = 0;
    std::optional<std::uint64_t> first_clean;  // first emitted uncorrupted frame index
    std::optional<std::uint64_t> last_clean;

    std::uint64_t count(FaultType t) const;
    std::uint64_t dropped() const { return count(FaultType::Drop) + count(FaultType::BurstDrop); }
    /// Drops between the first and last clean emitted frame. Leading and
    /// trailing drops look like session truncation on the wire.
    std::uint64_t interior_dropped() const;
    std::uint64_t corrupted() const { return count(FaultType::Corrupt); }
};

/// ADC values for a given frame index.
using SignalSource = std::function<SampleBlock(std::uint64_t frame_index)>;

/// 12-bit ADC-range synthetic multichannel sEMG-like source, deterministic in `seed`.
SignalSource default_signal_source(std::uint64_t seed);

/// Incremental emulator: produces the wire bytes frame by frame.
class Emulator {
public:
    Emulator(std::uint64_t n_frames, SignalSource source, FaultPlan plan);

    bool done() const { return next_ >= n_frames_; }
    /// Appends up to `max_frames` generated frames (dropped frames emit nothing).
    void produce(std::vector<std::uint8_t>& out, std::uint64_t max_frames);
    const FaultLedger& ledger() const { return ledger_; }

private:
    std::uint64_t n_frames_;
    SignalSource source_;
    FaultPlan plan_;
    std::uint64_t next_ = 0;
    Rng rng_;
    bool prev_emitted_corrupt_ = false;
    FaultLedger ledger_;
};

struct Emulation {
    std::vector<std::uint8_t> bytes;
    FaultLedger ledger;
};

Emulation emulate(std::uint64_t n_frames, const SignalSource& source, const FaultPlan& plan);

/// Emulator thread producing into a bounded queue of byte chunks while the
/// calling thread analyses them.
struct PipelineResult {
    StreamIntegrityReport report;
    FaultLedger ledger;
};

PipelineResult run_pipelined(std::uint64_t n_frames, const SignalSource& source, const FaultPlan& plan,
                             const AnalyzerOptions& opts, std::size_t queue_capacity = 8,
                             std::uint64_t frames_per_chunk = 256);

}  // namespace emgvalid::comms
