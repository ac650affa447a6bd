#include "voxmask/anonymize.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "voxmask/dsp.hpp"
#include "voxmask/lpc.hpp"

namespace voxmask {

namespace {

constexpr double kPreEmphasis = 0.97;

bool is_silent(const std::vector<double>& x) {
    for (double v : x)
        if (std::abs(v) > 1e-8) return false;
    return true;
}

// Waveform-similarity overlap-add time stretch to an exact output length.
// `samples` are treated as being at `rate` regardless of their origin.
std::vector<double> wsola_stretch(const std::vector<double>& x, int rate,
                                  std::size_t target_len) {
    const std::size_t src_len = x.size();
    if (src_len == 0 || target_len == 0) return std::vector<double>(target_len, 0.0);

    const int frame = std::max(64, rate * 32 / 1000);
    const int hop = frame / 2;
    const int search = std::max(8, rate * 10 / 1000);

    if (src_len < static_cast<std::size_t>(2 * frame)) {
        // too short for overlap-add; nearest-sample time mapping
        std::vector<double> out(target_len);
        for (std::size_t i = 0; i < target_len; ++i) {
            const std::size_t j = std::min<std::size_t>(
                src_len - 1, static_cast<std::size_t>(std::llround(
                                 i * static_cast<double>(src_len - 1) /
                                 std::max<std::size_t>(1, target_len - 1))));
            out[i] = x[j];
        }
        return out;
    }

    const double stretch = static_cast<double>(target_len) / src_len;
    const auto window = make_window(WindowType::kHann, frame);
    const long max_start = static_cast<long>(src_len) - frame;

    std::vector<double> acc(target_len + frame, 0.0);
    std::vector<double> wsum(target_len + frame, 0.0);

    long chosen = 0;
    for (std::size_t k = 0; k * hop < target_len; ++k) {
        const std::size_t out_pos = k * hop;
        long start;
        if (k == 0) {
            start = 0;
        } else {
            const long ideal =
                std::clamp(static_cast<long>(std::llround(out_pos / stretch)), 0L, max_start);
            const long natural = std::min(chosen + hop, max_start);
            const long lo = std::clamp(ideal - search, 0L, max_start);
            const long hi = std::clamp(ideal + search, 0L, max_start);

            // slide the candidate over the natural continuation and keep the
            // best-normalized match of the overlapping half window
            double template_energy = 0.0;
            for (int j = 0; j < hop; ++j) template_energy += x[natural + j] * x[natural + j];
            double cand_energy = 0.0;
            for (int j = 0; j < hop; ++j) cand_energy += x[lo + j] * x[lo + j];

            start = ideal;
            if (template_energy > 1e-12) {
                double best_score = -2.0;
                double energy = cand_energy;
                for (long q = lo; q <= hi; ++q) {
                    if (q > lo) {  // sliding energy update
                        energy += x[q - 1 + hop] * x[q - 1 + hop] - x[q - 1] * x[q - 1];
                    }
                    double dot = 0.0;
                    for (int j = 0; j < hop; ++j) dot += x[q + j] * x[natural + j];
                    const double score = dot / std::sqrt(std::max(energy, 1e-12));
                    if (score > best_score) {
                        best_score = score;
                        start = q;
                    }
                }
            }
        }
        for (int j = 0; j < frame && out_pos + j < acc.size(); ++j) {
            acc[out_pos + j] += window[j] * x[start + j];
            wsum[out_pos + j] += window[j];
        }
        chosen = start;
    }

    std::vector<double> out(target_len);
    for (std::size_t i = 0; i < target_len; ++i)
        out[i] = wsum[i] > 1e-8 ? acc[i] / wsum[i]
                                : x[std::min<std::size_t>(i, src_len - 1)];
    return out;
}

std::string format_step(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

Gender parse_gender(const std::string& token) {
    std::string t;
    for (char c : token) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (t == "male" || t == "m") return Gender::kMale;
    if (t == "female" || t == "f") return Gender::kFemale;
    if (t == "unspecified" || t == "u" || t.empty()) return Gender::kUnspecified;
    throw std::invalid_argument("unknown gender token '" + token + "'");
}

std::string gender_name(Gender g) {
    switch (g) {
        case Gender::kMale: return "male";
        case Gender::kFemale: return "female";
        default: return "unspecified";
    }
}

void AnonymizerConfig::validate() {
    if (semitone_step < 0.0)
        throw std::invalid_argument("config: semitone step must be non-negative");
    if (lpc_order < 1 || lpc_order > 64)
        throw std::invalid_argument("config: lpc order must be in [1, 64]");
    if (!(mcadams_alpha > 0.0 && mcadams_alpha <= 1.0))
        throw std::invalid_argument("config: mcadams alpha must be in (0, 1]");
    if (method == AnonymizeMethod::kExternal) {
        if (backend_command.find("{input}") == std::string::npos ||
            backend_command.find("{output}") == std::string::npos)
            throw std::invalid_argument(
                "config: backend command needs {input} and {output} placeholders");
    }
    if (name.empty()) {
        switch (method) {
            case AnonymizeMethod::kPitch: name = "pitch_step" + format_step(semitone_step); break;
            case AnonymizeMethod::kMcadams: name = "mcadams_lpc" + std::to_string(lpc_order); break;
            case AnonymizeMethod::kExternal: name = "external"; break;
        }
    }
}

double apply_gender_policy(Gender gender, double step, GenderPolicy policy) {
    if (policy == GenderPolicy::kFixedDirection) return +step;
    switch (gender) {
        case Gender::kMale: return +step;
        case Gender::kFemale: return -step;
        default:
            throw std::invalid_argument(
                "gendered shift policy requires a male/female gender label");
    }
}

AudioClip pitch_shift(const AudioClip& clip, double signed_semitones, AnonymizeStats* stats) {
    validate_clip(clip);
    if (std::abs(signed_semitones) > 24.0)
        throw std::invalid_argument("pitch_shift: shift must be within +-24 semitones");
    if (is_silent(clip.samples)) {
        if (stats) stats->silent_input = true;
        return clip;
    }

    // Shorten/lengthen the waveform so pitch scales by 2^(s/12) when read
    // at the original rate, then stretch the duration back.
    const double ratio = std::pow(2.0, -signed_semitones / 12.0);
    const int intermediate_rate =
        std::max(1000, static_cast<int>(std::llround(clip.sample_rate * ratio)));
    AudioClip shifted = resample(clip, intermediate_rate);
    AudioClip out;
    out.sample_rate = clip.sample_rate;
    out.id = clip.id;
    out.samples = wsola_stretch(shifted.samples, clip.sample_rate, clip.samples.size());
    return out;
}

AudioClip mcadams_anonymize(const AudioClip& clip, int lpc_order, double alpha,
                            AnonymizeStats* stats) {
    validate_clip(clip);
    if (lpc_order < 1 || lpc_order > 64)
        throw std::invalid_argument("mcadams: lpc order must be in [1, 64]");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("mcadams: alpha must be in (0, 1]");

    const int rate = clip.sample_rate;
    const int frame = rate * 25 / 1000;
    const int hop = rate * 10 / 1000;
    const std::size_t len = clip.samples.size();
    const auto window = make_window(WindowType::kHann, frame);

    std::vector<double> pre = pre_emphasis(clip.samples, kPreEmphasis);
    pre.resize(len + frame, 0.0);  // pad so the tail is fully covered

    std::vector<double> acc(pre.size(), 0.0), wsum(pre.size(), 0.0);
    std::vector<double> buf(frame);
    int clamped = 0;

    const double angle_lo = 0.001;
    const double angle_hi = std::numbers::pi - 0.001;

    for (std::size_t start = 0; start + frame <= pre.size(); start += hop) {
        for (int n = 0; n < frame; ++n) buf[n] = pre[start + n] * window[n];

        auto model = lpc_analyze(buf, lpc_order);
        if (!model) {
            for (int n = 0; n < frame; ++n) {
                acc[start + n] += buf[n];
                wsum[start + n] += window[n];
            }
            continue;
        }

        // warp conjugate pole pairs: theta -> theta^alpha, magnitude kept
        std::vector<std::complex<double>> warped;
        warped.reserve(model->poles.size());
        for (const auto& pole : model->poles) {
            if (pole.imag() > 0.0) {
                double theta = std::arg(pole);
                double mag = std::abs(pole);
                if (theta > angle_lo && theta < angle_hi) theta = std::pow(theta, alpha);
                if (mag >= 1.0) {
                    mag = 0.998;
                    ++clamped;
                }
                const std::complex<double> p = std::polar(mag, theta);
                warped.push_back(p);
                warped.push_back(std::conj(p));
            } else if (pole.imag() == 0.0) {
                double mag = pole.real();
                if (std::abs(mag) >= 1.0) {
                    mag = mag > 0 ? 0.998 : -0.998;
                    ++clamped;
                }
                warped.emplace_back(mag, 0.0);
            }
            // negative-imag poles arrive via their conjugates
        }

        LpcModel warped_model;
        warped_model.order = static_cast<int>(warped.size());
        warped_model.coefficients = poly_from_poles(warped);
        warped_model.poles = std::move(warped);
        warped_model.gain = model->gain;

        const auto residual = lpc_residual(buf, *model);
        const auto synth = lpc_synthesize(residual, warped_model);
        for (int n = 0; n < frame; ++n) {
            acc[start + n] += synth[n];
            wsum[start + n] += window[n];
        }
    }

    std::vector<double> mixed(len);
    for (std::size_t i = 0; i < len; ++i)
        mixed[i] = wsum[i] > 1e-8 ? acc[i] / wsum[i] : pre[i];

    AudioClip out;
    out.sample_rate = rate;
    out.id = clip.id;
    out.samples = de_emphasis(mixed, kPreEmphasis);
    if (stats) stats->clamped_poles += clamped;
    return out;
}

AudioClip run_external_backend(const std::string& clip_path, const AnonymizerConfig& config) {
    namespace fs = std::filesystem;
    if (config.backend_command.find("{input}") == std::string::npos ||
        config.backend_command.find("{output}") == std::string::npos)
        throw std::invalid_argument("backend command needs {input} and {output} placeholders");

    char tmpl[] = "/tmp/voxmask.XXXXXX";
    char* tmp = ::mkdtemp(tmpl);
    if (!tmp) throw std::runtime_error("backend: cannot create temp directory");
    const std::string tmp_dir = tmp;
    const std::string out_path = tmp_dir + "/out.wav";
    const std::string err_path = tmp_dir + "/stderr";

    std::string cmd = config.backend_command;
    auto substitute = [&cmd](const std::string& key, const std::string& value) {
        for (std::size_t at = cmd.find(key); at != std::string::npos; at = cmd.find(key))
            cmd.replace(at, key.size(), value);
    };
    substitute("{input}", clip_path);
    substitute("{output}", out_path);

    struct Cleanup {
        std::string dir;
        ~Cleanup() {
            std::error_code ec;
            fs::remove_all(dir, ec);
        }
    } cleanup{tmp_dir};

    pid_t pid = ::fork();
    if (pid < 0) throw std::runtime_error("backend: fork failed");
    if (pid == 0) {
        ::setpgid(0, 0);
        int fd = ::open(err_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
        if (fd >= 0) {
            ::dup2(fd, 2);
            ::close(fd);
        }
        ::execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }

    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::milliseconds(
                              static_cast<long>(config.backend_timeout_seconds * 1000));
    int status = 0;
    for (;;) {
        const pid_t r = ::waitpid(pid, &status, WNOHANG);
        if (r == pid) break;
        if (r < 0) throw std::runtime_error("backend: waitpid failed");
        if (std::chrono::steady_clock::now() >= deadline) {
            ::kill(-pid, SIGKILL);
            ::waitpid(pid, &status, 0);
            throw std::runtime_error("backend: command timed out after " +
                                     std::to_string(config.backend_timeout_seconds) + " s: " + cmd);
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }

    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        std::string stderr_text;
        std::ifstream err(err_path);
        if (err) {
            stderr_text.assign((std::istreambuf_iterator<char>(err)),
                               std::istreambuf_iterator<char>());
            if (stderr_text.size() > 4096) stderr_text.resize(4096);
        }
        const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        throw std::runtime_error("backend: command failed (exit " + std::to_string(code) +
                                 "): " + cmd + (stderr_text.empty() ? "" : "\n" + stderr_text));
    }
    if (!fs::exists(out_path))
        throw std::runtime_error("backend: command produced no output file: " + cmd);

    AudioClip produced = read_wav(out_path);
    return resample(produced, kCanonicalRate);
}

std::vector<BatchItem> anonymize_batch(const std::vector<BatchRecord>& records,
                                       const AnonymizerConfig& config_in,
                                       const std::string& out_dir, int workers) {
    namespace fs = std::filesystem;
    AnonymizerConfig config = config_in;
    config.validate();
    fs::create_directories(out_dir);

    std::vector<BatchItem> items(records.size());
    std::atomic<std::size_t> next{0};

    auto process_one = [&](std::size_t i) {
        const auto& rec = records[i];
        BatchItem item;
        item.id = rec.id;
        item.output_path = (fs::path(out_dir) / (rec.id + ".wav")).string();
        try {
            AudioClip result;
            switch (config.method) {
                case AnonymizeMethod::kPitch: {
                    const AudioClip clip = load_clip_canonical(rec.wav_path, rec.id);
                    const double shift =
                        apply_gender_policy(rec.gender, config.semitone_step,
                                            config.gender_policy);
                    result = pitch_shift(clip, shift, &item.stats);
                    break;
                }
                case AnonymizeMethod::kMcadams: {
                    const AudioClip clip = load_clip_canonical(rec.wav_path, rec.id);
                    result = mcadams_anonymize(clip, config.lpc_order, config.mcadams_alpha,
                                               &item.stats);
                    break;
                }
                case AnonymizeMethod::kExternal: {
                    if (!fs::exists(rec.wav_path))
                        throw std::runtime_error("missing input file " + rec.wav_path);
                    result = run_external_backend(rec.wav_path, config);
                    result.id = rec.id;
                    break;
                }
            }
            // filtered output can overshoot full scale; rescale instead of clipping
            double peak = 0.0;
            for (double s : result.samples) peak = std::max(peak, std::abs(s));
            if (peak > 1.0)
                for (auto& s : result.samples) s /= peak;
            write_wav(result, item.output_path);
            item.ok = true;
        } catch (const std::exception& e) {
            item.ok = false;
            item.error = e.what();
        }
        items[i] = std::move(item);
    };

    const int nworkers = std::max(1, std::min<int>(workers, static_cast<int>(records.size())));
    if (nworkers == 1) {
        for (std::size_t i = 0; i < records.size(); ++i) process_one(i);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nworkers);
        for (int w = 0; w < nworkers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < records.size();
                     i = next.fetch_add(1))
                    process_one(i);
            });
        for (auto& t : pool) t.join();
    }
    return items;
}

}  // namespace voxmask
