import os
from dotenv import load_dotenv
import yaml
from pyprojroot import here
load_dotenv()

with open(here("configs/config.yml")) as cfg:
    app_config = yaml.load(cfg, Loader=yaml.FullLoader)


class LoadDirectoriesConfig:
    def __init__(self) -> None:
        # Shipped scenario presets and default output location
        self.scenarios_dir = here(app_config["directories"]["scenarios"])
        self.results_dir = here(app_config["directories"]["results"])


class LoadSolverConfig:
    def __init__(self) -> None:
        sa = app_config["solver"]["sa"]
        self.sa_t0 = sa["t0"]
        self.sa_t_end_ratio = float(sa["t_end_ratio"])
        self.sa_sweeps = int(sa["sweeps"])
        self.sa_replicas = int(sa["replicas"])
        self.sa_seed = int(sa["seed"])

        bif = app_config["solver"]["bifurcation"]
        self.bif_steps = int(bif["steps"])
        self.bif_dt = float(bif["dt"])
        self.bif_schedule = bif["schedule"]
        self.bif_replicas = int(bif["replicas"])
        self.bif_seed = int(bif["seed"])
        self.bif_polish = bool(bif["polish"])

        self.exhaustive_max_spins = int(app_config["solver"]["exhaustive"]["max_spins"])
        self.dense_threshold = int(app_config["fast_path"]["dense_threshold"])
        self.quantize_bits = int(app_config["quantization"]["bits"])
        self.quantize_max_spins = int(app_config["quantization"]["max_spins"])
        self.reduce_threshold_scale = float(app_config["reduction"]["threshold_scale"])
        self.successive_max_sweeps = int(app_config["baselines"]["successive_max_sweeps"])
        self.continuous_max_sweeps = int(app_config["baselines"]["continuous_max_sweeps"])
        self.n_jobs = int(app_config["parallel"]["n_jobs"])


class LoadSweepConfig:
    def __init__(self) -> None:
        self.d_start = float(app_config["sweep"]["d_start"])
        self.d_stop = float(app_config["sweep"]["d_stop"])
        self.d_step = float(app_config["sweep"]["d_step"])
        self.n_jobs = int(app_config["parallel"]["n_jobs"])


class LoadConfig:
    def __init__(self) -> None:
        self.log_level = os.getenv("RIS_ISING_LOG_LEVEL", app_config["logging"]["level"])
        self.log_format = app_config["logging"]["format"]
