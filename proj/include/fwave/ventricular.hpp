#pragma once

#include <cstddef>
#include <vector>

#include "fwave/core.hpp"

namespace fwave {

// Dominant QRST shape across the detected beats, on a fixed window around
// the R peak. samples.size() == round((window_pre + window_post) * rate).
struct QrstTemplate {
    std::vector<double> samples;   // mV
    double window_pre = 0.10;      // s before R
    double window_post = 0.45;     // s after R
    double sampling_rate = 977.0;  // Hz
};

// Pan-Tompkins-style detector: zero-phase 5-25 Hz band-pass, squaring,
// 150 ms moving-window integration, adaptive threshold with a 0.25 s
// refractory, peak positions refined to the band-passed apex. Throws
// NoBeatsFound when no convincing ventricular spikes stand above the
// background (e.g. an atrial-only record).
RPeakList detect_r_peaks(const EcgRecord& record);

// Template = dominant left singular vector of the beat matrix (beats with a
// full window inside the record, as columns), sign-aligned with the ensemble
// mean and scaled so its energy equals the mean beat energy.
QrstTemplate build_qrst_template(const EcgRecord& record, const RPeakList& peaks);

// Subtracts a least-squares-scaled template copy at every beat, then removes
// a linear ramp across each window so the result meets the neighbouring
// samples without a step. Windows are truncated at 85% of the local RR and
// never overlap; samples outside every window are untouched. Beats whose
// window would cross a record edge are left uncancelled and reported through
// skipped (peak indices) when given.
EcgRecord cancel_qrst(const EcgRecord& record, const RPeakList& peaks,
                      const QrstTemplate& tmpl,
                      std::vector<std::size_t>* skipped = nullptr);

// detect_r_peaks + build_qrst_template + cancel_qrst. A record with no
// detectable beats is passed through unchanged apart from the stage.
EcgRecord extract_fwaves(const EcgRecord& record);

}  // namespace fwave
