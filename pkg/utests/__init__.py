import os


OUT_PATH = os.path.join(os.path.dirname(os.path.realpath(__file__)), 'out')
