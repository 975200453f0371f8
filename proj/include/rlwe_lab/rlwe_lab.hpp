#pragma once

#include "rlwe_lab/attack.hpp"
#include "rlwe_lab/basis.hpp"
#include "rlwe_lab/crypto.hpp"
#include "rlwe_lab/experiment.hpp"
#include "rlwe_lab/hnf.hpp"
#include "rlwe_lab/io.hpp"
#include "rlwe_lab/lattice.hpp"
#include "rlwe_lab/report.hpp"
#include "rlwe_lab/ring.hpp"
#include "rlwe_lab/rng.hpp"
#include "rlwe_lab/stats.hpp"
