def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: long nonlinear or physical-frame runs')
