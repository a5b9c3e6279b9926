#pragma once

#include "pncvlc/errors.hpp"
#include "pncvlc/exchange.hpp"
#include "pncvlc/integrity.hpp"
#include "pncvlc/metrics.hpp"
#include "pncvlc/ofdm_phy.hpp"
#include "pncvlc/oracle_check.hpp"
#include "pncvlc/pnc_link.hpp"
#include "pncvlc/scenario.hpp"
#include "pncvlc/scheme.hpp"
#include "pncvlc/sweep.hpp"
#include "pncvlc/vlc_channel.hpp"
