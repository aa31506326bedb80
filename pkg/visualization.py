"""
Visualization Module
Milestone timelines and verification layer charts
"""

import os

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import pandas as pd
import seaborn as sns

import config
from utils import verdicts_dataframe


class VerificationCharts:
    """Create verification status charts"""

    def __init__(self, output_dir=config.OUTPUT_DIR):
        self.output_dir = output_dir
        os.makedirs(output_dir, exist_ok=True)
        plt.style.use(config.CHART_STYLE)
        sns.set_palette("husl")

    def plot_milestones(self, timeline, mode='extension'):
        """Door and gear milestones on a shared time axis (deciseconds)"""

        df = pd.DataFrame(timeline, columns=['event', 'ck_door', 'ck_gear'])
        df['component'] = df['ck_gear'].apply(lambda g: 'door' if pd.isna(g) else 'gear')

        plt.figure(figsize=config.CHART_FIGURE_SIZE)
        sns.scatterplot(data=df, x='ck_door', y='event', hue='component', s=120)

        # events are unique, so row k sits at category position k
        for k, row in df.iterrows():
            plt.hlines(k, 0, row['ck_door'], colors='lightgray', linestyles='dotted')
            plt.text(row['ck_door'] + 0.5, k, f"{row['ck_door']}", va='center', fontsize=9)

        plt.title(f'Nominal {mode.title()} Milestones', fontsize=14, fontweight='bold')
        plt.xlabel('ck_door (ds)', fontsize=11)
        plt.ylabel('')
        plt.tight_layout()

        filename = f'{self.output_dir}/{mode}_milestones.png'
        plt.savefig(filename, dpi=config.CHART_DPI, bbox_inches='tight')
        plt.close()
        print(f"✓ Saved: {filename}")
        return filename

    def plot_layers(self, report):
        """Property results stacked per facet layer"""

        df = verdicts_dataframe(report.get('verdicts', []))
        if df.empty:
            return None
        counts = df.groupby(['facet', 'result']).size().unstack(fill_value=0)
        order = [f for f in config.FACET_PRIORITIES if f in counts.index]
        order += [f for f in counts.index if f not in order]
        counts = counts.loc[order]
        colors = [config.RESULT_COLORS.get(r, '#cccccc') for r in counts.columns]

        counts.plot(kind='bar', stacked=True, figsize=config.CHART_FIGURE_SIZE, color=colors)
        plt.title('Property Results by Facet', fontsize=14, fontweight='bold')
        plt.xlabel('')
        plt.ylabel('Properties', fontsize=11)
        plt.xticks(rotation=0)
        plt.legend(title='result')
        plt.tight_layout()

        filename = f'{self.output_dir}/layer_results.png'
        plt.savefig(filename, dpi=config.CHART_DPI, bbox_inches='tight')
        plt.close()
        print(f"✓ Saved: {filename}")
        return filename
