#pragma once

#include "ctfm/config.hpp"
#include "ctfm/demod.hpp"
#include "ctfm/error.hpp"
#include "ctfm/experiment.hpp"
#include "ctfm/phase_analysis.hpp"
#include "ctfm/scene.hpp"
#include "ctfm/spectrum.hpp"
#include "ctfm/waveform.hpp"
