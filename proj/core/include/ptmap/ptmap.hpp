#pragma once

#include "ptmap/baselines.hpp"
#include "ptmap/episode.hpp"
#include "ptmap/error.hpp"
#include "ptmap/eval.hpp"
#include "ptmap/feature_bank.hpp"
#include "ptmap/map_classifier.hpp"
#include "ptmap/preprocess.hpp"
#include "ptmap/rng.hpp"
#include "ptmap/sinkhorn.hpp"
