#pragma once

#include "expdesign.hpp"
#include "fixtures.hpp"
#include "linalg.hpp"
#include "metrics.hpp"
#include "openquant.hpp"
#include "qcore.hpp"
#include "recon.hpp"
#include "seqpt.hpp"
#include "types.hpp"
#include "weakmeas.hpp"
