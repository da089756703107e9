#pragma once

#include <string>
#include <vector>

#include "eprldpc/channel.hpp"
#include "eprldpc/decoders.hpp"

namespace eprldpc {

enum class DecoderId { qspa, seb, hepr, sepr, ser, bec };

std::string decoder_name(DecoderId id);
DecoderId decoder_from_name(const std::string& name);

/// qalist v1 text format: header, non-binary rows as col:exponent pairs,
/// generator activity per symbol, extended parity rows with provenance tags.
void write_qalist(const CodeSpec& spec, const std::string& path);
CodeSpec read_qalist(const std::string& path);
std::string qalist_to_string(const CodeSpec& spec);
CodeSpec qalist_from_string(const std::string& text);

struct ExperimentPlan {
    DecoderId decoder = DecoderId::sepr;
    ChannelKind channel = ChannelKind::biawgn;
    std::vector<double> points;  // crossover / erasure / EbN0 dB per grid point
    long long min_frame_errors = 100;
    long long max_frames = 1'000'000;
    HybridSchedule sched;
    int max_iter = 40;  // qspa / seb iteration cap
    uint64_t master_seed = 1;
    TransmitMode mode = TransmitMode::base;
    int workers = 2;
    bool timing = false;  // stamp wall seconds into the CSV (off: deterministic output)
    std::string dump_frames_path;  // optional binary frame dump
    std::string trace_path;        // optional per-decode trace CSV (first frame of each point)
};

struct PointResult {
    double channel_param = 0;
    long long frames = 0;
    long long bit_errors = 0;
    long long frame_errors = 0;
    long long undetected = 0;
    long long bits_per_frame = 0;
    double ber = 0, fer = 0, ci_low = 0, ci_high = 0, mean_iters = 0, seconds = 0;
};

struct SweepResult {
    ExperimentPlan plan;
    std::vector<PointResult> points;

    std::string csv() const;
    std::string svg() const;
};

/// Monte-Carlo sweep over the channel grid. Byte-identical output for a given
/// (plan, master seed) regardless of worker count; frames are addressed by
/// (seed, point, frame) so any trial reproduces in isolation.
SweepResult run_sweep(const CodeSpec& spec, const ExperimentPlan& plan);

struct ThresholdOptions {
    double lo = 0.0, hi = 3.0;  // channel parameter bracket
    double target = 0.01;       // syndrome-entropy (or residual-erasure) target
    double tolerance = 0.05;    // bracket width at exit
    int iterations = 200;
    int frames = 24;
    uint64_t seed = 7;
};

struct ThresholdEstimate {
    double t_b = 0;
    double lo = 0, hi = 0;
    std::vector<std::pair<double, double>> trace;  // (param, metric)
};

/// Bisection on the channel parameter against the average syndrome-bit
/// entropy after a fixed iteration budget (residual erasure rate over a BEC).
ThresholdEstimate estimate_threshold(const CodeSpec& spec, DecoderId decoder, ChannelKind kind,
                                     TransmitMode mode, const ThresholdOptions& opt);

/// Binomial (Wilson, 3-sigma) confidence interval.
std::pair<double, double> binomial_ci(long long successes, long long trials);

} // namespace eprldpc
