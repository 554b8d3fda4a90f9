// Copyright 2026 The hybridse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HYBRIDSE_HYBRIDSE_HPP_
#define HYBRIDSE_HYBRIDSE_HPP_

#include "hybridse/error.hpp"
#include "hybridse/rng.hpp"
#include "hybridse/signal/waveform.hpp"
#include "hybridse/signal/fft.hpp"
#include "hybridse/signal/stft.hpp"
#include "hybridse/signal/filter.hpp"
#include "hybridse/signal/resample.hpp"
#include "hybridse/signal/wav_io.hpp"
#include "hybridse/nn/matrix.hpp"
#include "hybridse/nn/layers.hpp"
#include "hybridse/nn/tensor3.hpp"
#include "hybridse/nn/tensor_io.hpp"
#include "hybridse/disc/gridnet.hpp"
#include "hybridse/gen/semantic.hpp"
#include "hybridse/gen/quantizer.hpp"
#include "hybridse/gen/ar_lm.hpp"
#include "hybridse/gen/dprnn.hpp"
#include "hybridse/gen/gen_branch.hpp"
#include "hybridse/losses/loss_report.hpp"
#include "hybridse/losses/spectral.hpp"
#include "hybridse/losses/perceptual.hpp"
#include "hybridse/losses/mstft.hpp"
#include "hybridse/losses/objectives.hpp"
#include "hybridse/fusion/fusion.hpp"
#include "hybridse/fusion/fusion_net.hpp"
#include "hybridse/fusion/hybrid.hpp"
#include "hybridse/sim/degrade.hpp"
#include "hybridse/sim/metrics.hpp"
#include "hybridse/sim/corpus.hpp"

#endif  // HYBRIDSE_HYBRIDSE_HPP_
