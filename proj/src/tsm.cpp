// Copyright 2026 The stnsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "stn/tsm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "fft.hpp"

namespace stn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double princarg(double phase) { return phase - kTwoPi * std::round(phase / kTwoPi); }

void check_factor(double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw ParameterError("stretch factor must be a positive finite number");
}

enum class PhaseMode { Locked, Random };

Signal stretch(std::span<const double> x, double factor, const StftConfig& cfg, PhaseMode mode,
               std::uint64_t seed) {
  check_factor(factor);
  cfg.validate();
  const std::size_t L = cfg.window_length;
  const std::size_t Hs = cfg.hop;
  const std::size_t K = cfg.bins();
  const std::size_t out_len = stretched_length(x.size(), factor);
  if (out_len == 0) return {};

  const auto window = make_window(cfg.window, L);
  const std::size_t J = (out_len + Hs - 1) / Hs + 1;
  const auto half = static_cast<std::ptrdiff_t>(L / 2);
  const auto n_in = static_cast<std::ptrdiff_t>(x.size());

  detail::RealFft fft(L);
  std::vector<double> frame(L);
  std::vector<std::complex<double>> spec(K), synth(K);
  std::vector<double> mag(K), phase(K), prev_phase(K), out_phase(K);
  std::vector<double> acc((J - 1) * Hs + L, 0.0), norm(acc.size(), 0.0);
  std::vector<std::size_t> peaks;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> random_phase(0.0, kTwoPi);
  std::ptrdiff_t prev_center = 0;

  for (std::size_t j = 0; j < J; ++j) {
    const auto center = static_cast<std::ptrdiff_t>(
        std::llround(static_cast<double>(j * Hs) / factor));
    for (std::size_t n = 0; n < L; ++n) {
      const auto idx = center - half + static_cast<std::ptrdiff_t>(n);
      frame[n] = (idx >= 0 && idx < n_in) ? x[static_cast<std::size_t>(idx)] * window[n] : 0.0;
    }
    fft.forward(frame, spec);
    for (std::size_t k = 0; k < K; ++k) {
      mag[k] = std::abs(spec[k]);
      phase[k] = std::arg(spec[k]);
    }

    if (mode == PhaseMode::Random) {
      for (std::size_t k = 0; k < K; ++k) out_phase[k] = random_phase(rng);
    } else if (j == 0) {
      out_phase = phase;
    } else {
      peaks.clear();
      for (std::size_t k = 1; k + 1 < K; ++k)
        if (mag[k] > mag[k - 1] && mag[k] >= mag[k + 1]) peaks.push_back(k);
      const auto da = static_cast<double>(center - prev_center);
      std::vector<double> next(K);
      if (peaks.empty()) {
        next = phase;
      } else {
        for (std::size_t p : peaks) {
          const double omega = kTwoPi * static_cast<double>(p) / static_cast<double>(L);
          double inst = omega;
          if (da > 0.0) inst += princarg(phase[p] - prev_phase[p] - omega * da) / da;
          next[p] = princarg(out_phase[p] + inst * static_cast<double>(Hs));
        }
        // Regions of influence split halfway between neighbouring peaks.
        std::size_t region_start = 0;
        for (std::size_t i = 0; i < peaks.size(); ++i) {
          const std::size_t p = peaks[i];
          const std::size_t region_end = i + 1 < peaks.size() ? (p + peaks[i + 1]) / 2 + 1 : K;
          for (std::size_t k = region_start; k < region_end; ++k)
            if (k != p) next[k] = next[p] + phase[k] - phase[p];
          region_start = region_end;
        }
      }
      out_phase = std::move(next);
    }
    prev_phase = phase;
    prev_center = center;

    for (std::size_t k = 0; k < K; ++k) synth[k] = std::polar(mag[k], out_phase[k]);
    fft.inverse(synth, frame);
    const std::size_t start = j * Hs;
    for (std::size_t n = 0; n < L; ++n) {
      acc[start + n] += frame[n] / static_cast<double>(L) * window[n];
      norm[start + n] += window[n] * window[n];
    }
  }

  double mean_sq = 0.0;
  for (double w : window) mean_sq += w * w;
  mean_sq /= static_cast<double>(L);

  Signal out(out_len);
  for (std::size_t i = 0; i < out_len; ++i) {
    const double d = norm[i + L / 2];
    if (d <= 0.0) continue;
    // Coherent frames add in amplitude, random-phase frames in power.
    out[i] = acc[i + L / 2] / (mode == PhaseMode::Locked ? d : std::sqrt(mean_sq * d));
  }
  return out;
}

}  // namespace

std::size_t stretched_length(std::size_t input_length, double factor) {
  check_factor(factor);
  return static_cast<std::size_t>(std::llround(factor * static_cast<double>(input_length)));
}

Signal pv_stretch_locked(std::span<const double> signal, double factor, const StftConfig& cfg) {
  return stretch(signal, factor, cfg, PhaseMode::Locked, 0);
}

Signal pv_stretch_randomized(std::span<const double> signal, double factor, const StftConfig& cfg,
                             std::uint64_t seed) {
  return stretch(signal, factor, cfg, PhaseMode::Random, seed);
}

std::vector<TransientEvent> detect_transients(std::span<const double> x,
                                              const TransientDetectParams& p, double fs) {
  if (!(fs > 0.0)) throw ParameterError("sample rate must be positive");
  std::vector<TransientEvent> events;
  const std::size_t n = x.size();
  if (n == 0) return events;

  const std::size_t win = std::max<std::size_t>(1, static_cast<std::size_t>(p.envelope_ms * 1e-3 * fs));
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i] * x[i];
  std::vector<double> env_db(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= win / 2 ? i - win / 2 : 0;
    const std::size_t hi = std::min(n, lo + win);
    const double e = std::max(0.0, prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
    env_db[i] = 10.0 * std::log10(e + 1e-300);
  }

  std::vector<double> sorted = env_db;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2), sorted.end());
  const double floor_db = sorted[n / 2];
  const double peak_db = *std::max_element(env_db.begin(), env_db.end());
  const double threshold = std::max({floor_db + p.threshold_db, peak_db - p.range_db,
                                     p.absolute_floor_db});
  if (peak_db < threshold) return events;

  // Runs above threshold, merged when closer than the minimum separation.
  const auto gap = static_cast<std::size_t>(p.min_separation_ms * 1e-3 * fs);
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  for (std::size_t i = 0; i < n;) {
    if (env_db[i] < threshold) { ++i; continue; }
    std::size_t j = i;
    while (j < n && env_db[j] >= threshold) ++j;
    if (!runs.empty() && i - runs.back().second < gap)
      runs.back().second = j;
    else
      runs.emplace_back(i, j);
    i = j;
  }

  const auto pre = static_cast<std::size_t>(p.pre_pad_ms * 1e-3 * fs);
  const auto post = static_cast<std::size_t>(p.post_pad_ms * 1e-3 * fs);
  for (const auto& [a, b] : runs) {
    std::size_t anchor = a;
    for (std::size_t i = a; i < b; ++i)
      if (x[i] * x[i] > x[anchor] * x[anchor]) anchor = i;
    TransientEvent ev{a > pre ? a - pre : 0, anchor, std::min(n, b + post)};
    if (ev.anchor == ev.start) {
      if (ev.start == 0) continue;
      --ev.start;
    }
    if (ev.anchor + 1 >= ev.end) {
      if (ev.end == n) continue;
      ++ev.end;
    }
    if (!events.empty() && ev.start < events.back().end) {
      TransientEvent& last = events.back();
      if (x[ev.anchor] * x[ev.anchor] > x[last.anchor] * x[last.anchor]) last.anchor = ev.anchor;
      last.end = std::max(last.end, ev.end);
    } else {
      events.push_back(ev);
    }
  }
  return events;
}

Signal reposition_transients(std::span<const double> x, const std::vector<TransientEvent>& events,
                             double factor, std::size_t output_length, double fs, double fade_ms) {
  check_factor(factor);
  Signal out(output_length, 0.0);
  const auto fade = static_cast<std::size_t>(fade_ms * 1e-3 * fs);
  for (const auto& ev : events) {
    const auto target = static_cast<std::ptrdiff_t>(std::llround(factor * static_cast<double>(ev.anchor)));
    const std::ptrdiff_t offset = target - static_cast<std::ptrdiff_t>(ev.anchor);
    const std::size_t len = ev.end - ev.start;
    const std::size_t f = std::min(fade, len / 2);
    for (std::size_t i = 0; i < len; ++i) {
      const auto dst = static_cast<std::ptrdiff_t>(ev.start + i) + offset;
      if (dst < 0 || dst >= static_cast<std::ptrdiff_t>(output_length)) continue;
      double gain = 1.0;
      if (f > 0) {
        // no fade on a side that touches the signal boundary: nothing to blend into
        const std::size_t head = ev.start == 0 ? f : i;
        const std::size_t tail = ev.end == x.size() ? f : len - 1 - i;
        const std::size_t edge = std::min(head, tail);
        if (edge < f) {
          const double s = std::sin(0.5 * kPi * (static_cast<double>(edge) + 0.5) / static_cast<double>(f));
          gain = s * s;
        }
      }
      out[static_cast<std::size_t>(dst)] += gain * x[ev.start + i];
    }
  }
  return out;
}

void TsmRequest::validate() const {
  check_factor(factor);
  plan.validate();
  pv_stft.validate();
  if (pv_stft.sample_rate != plan.stage1.stft.sample_rate)
    throw ParameterError("vocoder and decomposition sample rates differ");
  if (fade_ms < 0.0) throw ParameterError("fade length must be >= 0");
}

TsmResult tsm_stretch_detailed(std::span<const double> signal, const TsmRequest& req) {
  req.validate();
  const double fs = req.pv_stft.sample_rate;
  const std::size_t out_len = stretched_length(signal.size(), req.factor);
  TsmResult r;
  if (signal.empty()) return r;

  const StnComponents parts = decompose(signal, req.plan);
  r.stretched.sines = pv_stretch_locked(parts.sines, req.factor, req.pv_stft);
  r.stretched.noise = pv_stretch_randomized(parts.noise, req.factor, req.pv_stft, req.seed);
  r.events = detect_transients(parts.transients, req.detect, fs);
  r.stretched.transients =
      reposition_transients(parts.transients, r.events, req.factor, out_len, fs, req.fade_ms);

  r.output.resize(out_len);
  for (std::size_t i = 0; i < out_len; ++i)
    r.output[i] = r.stretched.sines[i] + r.stretched.transients[i] + r.stretched.noise[i];
  return r;
}

Signal tsm_stretch(std::span<const double> signal, const TsmRequest& req) {
  return tsm_stretch_detailed(signal, req).output;
}

}  // namespace stn
